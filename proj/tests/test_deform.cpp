#include <doctest.h>

#include <cmath>
#include <random>

#include "charanim/deform.hpp"
#include "oracles.hpp"

using namespace charanim;

namespace {

LabelTaxonomy arm_head_taxonomy(double alpha_scale = 1.0) {
    std::vector<SemanticClass> classes = {
        {0, "background", CoarseRegion::Background, 100.0 * alpha_scale, {}},
        {1, "lower_arm", CoarseRegion::Arms, 1.0 * alpha_scale, {}},
        {2, "head", CoarseRegion::Head, 100.0 * alpha_scale, {}},
    };
    return LabelTaxonomy(std::move(classes), 0);
}

// n_cols x 2 strip of unit quads, each split into two triangles.
CharacterMesh make_bar(int n_cols) {
    CharacterMesh mesh;
    for (int x = 0; x < n_cols; ++x) {
        mesh.vertices.emplace_back(x, 0.0);
        mesh.vertices.emplace_back(x, 1.0);
    }
    for (int x = 0; x + 1 < n_cols; ++x) {
        const int a = 2 * x, b = 2 * x + 1, c = 2 * x + 2, d = 2 * x + 3;
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({b, d, c});
    }
    mesh.rebuild_edges();
    return mesh;
}

// Independent minimizer of the identical objective: numerical gradient
// descent with backtracking over the free vertex coordinates. Rotations are
// refit inside ArapSystem::energy, so this optimizes the same function the
// solver reports.
double minimize_bruteforce(const CharacterMesh& mesh, const EdgeWeights& weights,
                           const std::vector<int>& handles, const std::vector<Vec2>& targets,
                           std::vector<Vec2> start) {
    std::vector<int> free_verts;
    std::vector<bool> is_handle(mesh.vertices.size(), false);
    for (int h : handles) is_handle[h] = true;
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        if (!is_handle[v]) free_verts.push_back(static_cast<int>(v));
    for (size_t k = 0; k < handles.size(); ++k) start[handles[k]] = targets[k];

    auto energy_of = [&](const std::vector<Vec2>& p) {
        return ArapSystem::energy(mesh, weights, mesh.vertices, p);
    };

    double e = energy_of(start);
    double step = 0.25;
    const double h = 1e-6;
    for (int iter = 0; iter < 20000 && step > 1e-14; ++iter) {
        std::vector<Vec2> grad(free_verts.size());
        for (size_t i = 0; i < free_verts.size(); ++i) {
            for (int c = 0; c < 2; ++c) {
                std::vector<Vec2> plus = start, minus = start;
                plus[free_verts[i]][c] += h;
                minus[free_verts[i]][c] -= h;
                grad[i][c] = (energy_of(plus) - energy_of(minus)) / (2 * h);
            }
        }
        double gnorm = 0;
        for (const Vec2& g : grad) gnorm += g.squaredNorm();
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-10) break;

        bool improved = false;
        while (step > 1e-14) {
            std::vector<Vec2> cand = start;
            for (size_t i = 0; i < free_verts.size(); ++i)
                cand[free_verts[i]] -= (step / gnorm) * grad[i];
            const double ce = energy_of(cand);
            if (ce < e) {
                start = cand;
                e = ce;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return e;
}

}  // namespace

TEST_CASE("edge weights follow the alpha sum rule") {
    const LabelTaxonomy tax = arm_head_taxonomy();
    CharacterMesh mesh = make_bar(3);
    SUBCASE("arm-arm edge weighs 2, head-head 200, mixed 101") {
        mesh.vertex_labels = {1, 1, 1, 2, 2, 2};
        const EdgeWeights w = compute_edge_weights(mesh, tax);
        for (size_t k = 0; k < mesh.edges.size(); ++k) {
            const ClassId a = mesh.vertex_labels[mesh.edges[k][0]];
            const ClassId b = mesh.vertex_labels[mesh.edges[k][1]];
            if (a == 1 && b == 1) CHECK(w.w[k] == 2.0);
            if (a == 2 && b == 2) CHECK(w.w[k] == 200.0);
            if (a != b) CHECK(w.w[k] == 101.0);
        }
    }
    SUBCASE("unlabeled mesh is an error") {
        mesh.vertex_labels.clear();
        CHECK_THROWS(compute_edge_weights(mesh, tax));
    }
    SUBCASE("exact integer equality on a large random labeled mesh") {
        std::mt19937 rng(41);
        CharacterMesh big = oracles::random_mesh(rng, 600);
        big.vertex_labels.resize(big.vertices.size());
        for (auto& l : big.vertex_labels) l = static_cast<ClassId>(1 + rng() % 2);
        const EdgeWeights w = compute_edge_weights(big, tax);
        REQUIRE(w.w.size() == big.edges.size());
        for (size_t k = 0; k < big.edges.size(); ++k) {
            const double expect = tax.alpha(big.vertex_labels[big.edges[k][0]]) +
                                  tax.alpha(big.vertex_labels[big.edges[k][1]]);
            CHECK(w.w[k] == expect);  // exact
        }
    }
}

TEST_CASE("arap solve basics") {
    const LabelTaxonomy tax = arm_head_taxonomy();
    CharacterMesh mesh = make_bar(4);
    mesh.vertex_labels.assign(mesh.vertices.size(), 1);
    const EdgeWeights w = compute_edge_weights(mesh, tax);
    const std::vector<int> handles = {0, 7};
    const ArapSystem system(mesh, w, handles);

    SUBCASE("rest handles reproduce the rest mesh at zero energy") {
        const ArapResult r = system.solve({mesh.vertices[0], mesh.vertices[7]});
        for (size_t v = 0; v < mesh.vertices.size(); ++v)
            CHECK((r.positions[v] - mesh.vertices[v]).norm() <= 1e-9);
        CHECK(r.energy <= 1e-9);
    }
    SUBCASE("translated handles translate every vertex") {
        const Vec2 t(7, -3);
        const ArapResult r = system.solve({mesh.vertices[0] + t, mesh.vertices[7] + t});
        for (size_t v = 0; v < mesh.vertices.size(); ++v)
            CHECK((r.positions[v] - (mesh.vertices[v] + t)).norm() <= 1e-6);
        CHECK(r.energy <= 1e-9);
    }
    SUBCASE("energy is non-increasing across iterations") {
        const ArapResult r = system.solve({mesh.vertices[0], Vec2(1.5, 2.8)});
        for (size_t i = 1; i < r.energy_per_iteration.size(); ++i)
            CHECK(r.energy_per_iteration[i] <=
                  r.energy_per_iteration[i - 1] * (1 + 1e-12) + 1e-12);
    }
    SUBCASE("non-finite target is an error") {
        CHECK_THROWS(system.solve({mesh.vertices[0],
                                   Vec2(std::numeric_limits<double>::quiet_NaN(), 0)}));
    }
    SUBCASE("contradictory duplicate handles are an error") {
        const ArapSystem dup(mesh, w, {0, 0, 7});
        CHECK_THROWS(dup.solve({Vec2(0, 0), Vec2(1, 0), Vec2(3, 1)}));
        CHECK_NOTHROW(dup.solve({Vec2(0, 0), Vec2(0, 0), Vec2(3, 1)}));
    }
}

TEST_CASE("rigid handle configurations are recovered exactly") {
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> angle(-3.0, 3.0), shift(-20.0, 20.0);
    const LabelTaxonomy tax = arm_head_taxonomy();
    for (int trial = 0; trial < 10; ++trial) {
        CharacterMesh mesh = oracles::random_mesh(rng, 80);
        mesh.vertex_labels.resize(mesh.vertices.size());
        for (auto& l : mesh.vertex_labels) l = static_cast<ClassId>(1 + rng() % 2);
        const EdgeWeights w = compute_edge_weights(mesh, tax);

        const double theta = angle(rng);
        Eigen::Matrix2d rot;
        rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        const Vec2 t(shift(rng), shift(rng));

        std::vector<int> handles = {0, static_cast<int>(mesh.vertices.size()) / 2,
                                    static_cast<int>(mesh.vertices.size()) - 1};
        std::vector<Vec2> targets;
        for (int h : handles) targets.push_back(rot * mesh.vertices[h] + t);

        const ArapSystem system(mesh, w, handles);
        const ArapResult r = system.solve(targets);
        for (size_t v = 0; v < mesh.vertices.size(); ++v)
            CHECK((r.positions[v] - (rot * mesh.vertices[v] + t)).norm() <= 1e-6);
        CHECK(r.energy <= 1e-9);
    }
}

TEST_CASE("bent bar matches a brute-force minimizer of the same objective") {
    const LabelTaxonomy tax = arm_head_taxonomy();
    CharacterMesh mesh = make_bar(3);  // 6 vertices, 2 handles -> 8 unknowns
    mesh.vertex_labels.assign(6, 1);
    const EdgeWeights w = compute_edge_weights(mesh, tax);

    const std::vector<int> handles = {0, 4};
    // rotate the far end 90 degrees about the first vertex
    const std::vector<Vec2> targets = {mesh.vertices[0], Vec2(0.0, 2.0)};

    const ArapSystem system(mesh, w, handles, {1e-9, 2000});
    const ArapResult r = system.solve(targets);

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 3; ++s) {
        std::vector<Vec2> start = mesh.vertices;
        if (s == 1) start = r.positions;
        if (s == 2)
            for (Vec2& p : start) p += Vec2(0.13 * s, -0.07);
        best = std::min(best, minimize_bruteforce(mesh, w, handles, targets, start));
    }
    CHECK(r.energy <= best * (1 + 1e-4) + 1e-9);
    CHECK(r.energy >= best * (1 - 1e-4) - 1e-9);
}

TEST_CASE("uniform alpha scaling leaves the minimizer unchanged") {
    CharacterMesh mesh = make_bar(4);
    mesh.vertex_labels = {1, 1, 2, 2, 2, 2, 1, 1};
    const EdgeWeights w1 = compute_edge_weights(mesh, arm_head_taxonomy(1.0));
    const EdgeWeights w3 = compute_edge_weights(mesh, arm_head_taxonomy(3.5));

    const std::vector<int> handles = {0, 7};
    const std::vector<Vec2> targets = {Vec2(0, 0), Vec2(2.2, 2.4)};
    const ArapOptions opt{1e-9, 2000};
    const ArapResult a = ArapSystem(mesh, w1, handles, opt).solve(targets);
    const ArapResult b = ArapSystem(mesh, w3, handles, opt).solve(targets);
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        CHECK((a.positions[v] - b.positions[v]).norm() <= 1e-6);
    CHECK(b.energy == doctest::Approx(3.5 * a.energy).epsilon(1e-6));
}

TEST_CASE("stiff half stays more rigid than the soft half under a bend") {
    const LabelTaxonomy tax = arm_head_taxonomy();
    CharacterMesh mesh = make_bar(9);  // columns 0..8
    mesh.vertex_labels.resize(mesh.vertices.size());
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        mesh.vertex_labels[v] = (static_cast<int>(v) / 2 < 4) ? 2 : 1;  // head | lower_arm
    const EdgeWeights w = compute_edge_weights(mesh, tax);

    // 45 degree bend: far end rotated about the bar midpoint
    const std::vector<int> handles = {0, 1, 16, 17};
    const double th = M_PI / 4;
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Vec2 pivot(4.0, 0.5);
    std::vector<Vec2> targets = {mesh.vertices[0], mesh.vertices[1],
                                 rot * (mesh.vertices[16] - pivot) + pivot,
                                 rot * (mesh.vertices[17] - pivot) + pivot};

    const ArapSystem system(mesh, w, handles, {1e-8, 1000});
    const ArapResult r = system.solve(targets);
    const std::vector<double> res =
        ArapSystem::triangle_rigidity_residuals(mesh, mesh.vertices, r.positions);

    double stiff = 0, soft = 0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        // triangle belongs to the stiff half when all its vertices do
        bool all_stiff = true, all_soft = true;
        for (int v : mesh.triangles[t]) {
            all_stiff &= mesh.vertex_labels[v] == 2;
            all_soft &= mesh.vertex_labels[v] == 1;
        }
        if (all_stiff) stiff = std::max(stiff, res[t]);
        if (all_soft) soft = std::max(soft, res[t]);
    }
    CHECK(soft > 0);
    CHECK(stiff < 0.2 * soft);
}

TEST_CASE("energy gradient vanishes at the solution") {
    const LabelTaxonomy tax = arm_head_taxonomy();
    CharacterMesh mesh = make_bar(4);
    mesh.vertex_labels.assign(8, 1);
    const EdgeWeights w = compute_edge_weights(mesh, tax);
    const std::vector<int> handles = {0, 1};
    const ArapSystem system(mesh, w, handles, {1e-10, 5000});
    const ArapResult r = system.solve({Vec2(0, 0), Vec2(0.2, 1.1)});

    const double h = 1e-6;
    for (size_t v = 2; v < mesh.vertices.size(); ++v)
        for (int c = 0; c < 2; ++c) {
            std::vector<Vec2> plus = r.positions, minus = r.positions;
            plus[v][c] += h;
            minus[v][c] -= h;
            const double g = (ArapSystem::energy(mesh, w, mesh.vertices, plus) -
                              ArapSystem::energy(mesh, w, mesh.vertices, minus)) / (2 * h);
            CHECK(std::abs(g) <= 1e-3);
        }
}
