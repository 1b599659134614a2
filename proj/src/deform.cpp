#include "charanim/deform.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace charanim {

EdgeWeights compute_edge_weights(const CharacterMesh& mesh, const LabelTaxonomy& taxonomy) {
    if (mesh.vertex_labels.size() != mesh.vertices.size())
        throw std::runtime_error("compute_edge_weights: mesh has unlabeled vertices");
    EdgeWeights weights;
    weights.w.reserve(mesh.edges.size());
    for (const auto& e : mesh.edges)
        weights.w.push_back(taxonomy.alpha(mesh.vertex_labels[e[0]]) +
                            taxonomy.alpha(mesh.vertex_labels[e[1]]));
    return weights;
}

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Eigen::Matrix2d rot(double theta) {
    Eigen::Matrix2d r;
    const double c = std::cos(theta), s = std::sin(theta);
    r << c, -s, s, c;
    return r;
}

}  // namespace

std::vector<double> ArapSystem::fit_rotations(const CharacterMesh& mesh,
                                              const EdgeWeights& weights,
                                              const std::vector<Vec2>& rest,
                                              const std::vector<Vec2>& deformed) {
    std::vector<double> cr(mesh.vertices.size(), 0.0), dt(mesh.vertices.size(), 0.0);
    for (size_t k = 0; k < mesh.edges.size(); ++k) {
        const auto [i, j] = mesh.edges[k];
        const double w = weights.w[k];
        const Vec2 e = rest[i] - rest[j];
        const Vec2 ed = deformed[i] - deformed[j];
        const double c = w * cross2(e, ed);
        const double d = w * e.dot(ed);
        cr[i] += c;
        dt[i] += d;
        cr[j] += c;  // edge vectors negate in both factors for cell j
        dt[j] += d;
    }
    std::vector<double> theta(mesh.vertices.size());
    for (size_t i = 0; i < theta.size(); ++i)
        theta[i] = (cr[i] == 0.0 && dt[i] == 0.0) ? 0.0 : std::atan2(cr[i], dt[i]);
    return theta;
}

double ArapSystem::energy(const CharacterMesh& mesh, const EdgeWeights& weights,
                          const std::vector<Vec2>& rest, const std::vector<Vec2>& deformed) {
    const std::vector<double> theta = fit_rotations(mesh, weights, rest, deformed);
    double total = 0;
    for (size_t k = 0; k < mesh.edges.size(); ++k) {
        const auto [i, j] = mesh.edges[k];
        const double w = weights.w[k];
        const Vec2 e = rest[i] - rest[j];
        const Vec2 ed = deformed[i] - deformed[j];
        total += w * (ed - rot(theta[i]) * e).squaredNorm();
        total += w * (ed - rot(theta[j]) * e).squaredNorm();
    }
    return total;
}

ArapSystem::ArapSystem(const CharacterMesh& mesh, const EdgeWeights& weights,
                       std::vector<int> handle_indices, ArapOptions options)
    : mesh_(mesh), weights_(weights), options_(options) {
    const int n = static_cast<int>(mesh.vertices.size());
    if (weights.w.size() != mesh.edges.size())
        throw std::runtime_error("ArapSystem: weight count does not match edge count");
    if (handle_indices.empty()) throw std::runtime_error("ArapSystem: handle set is empty");
    for (int h : handle_indices)
        if (h < 0 || h >= n)
            throw std::runtime_error("ArapSystem: handle index out of range");

    // Keep duplicates out of the constraint set but remember the original
    // list so solve() can detect contradictory targets.
    handles_ = handle_indices;
    std::vector<int> uniq = handle_indices;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    free_index_.assign(n, 0);
    for (int h : uniq) free_index_[h] = -1;
    free_vertices_.clear();
    for (int v = 0; v < n; ++v)
        if (free_index_[v] == 0) {
            free_index_[v] = static_cast<int>(free_vertices_.size());
            free_vertices_.push_back(v);
        }

    adjacency_.assign(n, {});
    for (size_t k = 0; k < mesh.edges.size(); ++k) {
        const auto [i, j] = mesh.edges[k];
        adjacency_[i].push_back({j, weights.w[k]});
        adjacency_[j].push_back({i, weights.w[k]});
    }

    std::vector<int> handle_slot(n, -1);
    for (size_t s = 0; s < uniq.size(); ++s) handle_slot[uniq[s]] = static_cast<int>(s);

    const int nf = static_cast<int>(free_vertices_.size());
    std::vector<Eigen::Triplet<double>> lff, lfh;
    for (int fi = 0; fi < nf; ++fi) {
        const int v = free_vertices_[fi];
        double diag = 0;
        for (const auto& [nbr, w] : adjacency_[v]) {
            diag += w;
            if (free_index_[nbr] >= 0)
                lff.emplace_back(fi, free_index_[nbr], -w);
            else
                lfh.emplace_back(fi, handle_slot[nbr], -w);
        }
        lff.emplace_back(fi, fi, diag);
    }
    Eigen::SparseMatrix<double> l_ff(nf, nf);
    l_ff.setFromTriplets(lff.begin(), lff.end());
    l_free_handle_.resize(nf, static_cast<int>(uniq.size()));
    l_free_handle_.setFromTriplets(lfh.begin(), lfh.end());

    if (nf > 0) {
        solver_.compute(l_ff);
        if (solver_.info() != Eigen::Success)
            throw std::runtime_error("ArapSystem: singular global system "
                                     "(a mesh component may have no handle)");
    }
}

ArapResult ArapSystem::solve(const std::vector<Vec2>& handle_targets,
                             const std::vector<Vec2>* rest_override) const {
    const std::vector<Vec2>& rest = rest_override ? *rest_override : mesh_.vertices;
    const int n = static_cast<int>(rest.size());
    if (rest.size() != mesh_.vertices.size())
        throw std::runtime_error("ArapSystem: rest override has wrong vertex count");
    if (handle_targets.size() != handles_.size())
        throw std::runtime_error("ArapSystem: expected one target per handle");
    for (const Vec2& t : handle_targets)
        if (!t.allFinite()) throw std::runtime_error("ArapSystem: non-finite handle target");

    const int nh = l_free_handle_.cols();
    std::vector<int> handle_slot(n, -1);
    {
        std::vector<int> uniq = handles_;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (size_t s = 0; s < uniq.size(); ++s) handle_slot[uniq[s]] = static_cast<int>(s);
    }
    Eigen::MatrixX2d ph(nh, 2);
    std::vector<bool> slot_set(nh, false);
    for (size_t k = 0; k < handles_.size(); ++k) {
        const int slot = handle_slot[handles_[k]];
        const Vec2& t = handle_targets[k];
        if (slot_set[slot] && (ph.row(slot).transpose() - t).norm() > 1e-12)
            throw std::runtime_error("ArapSystem: contradictory duplicate handle targets");
        ph.row(slot) = t;
        slot_set[slot] = true;
    }

    // Initial guess: best-fit rigid transform of the handle correspondences
    // applied to the whole rest mesh. Rigid handle configurations are then
    // solved exactly before the first iteration.
    ArapResult result;
    result.positions = rest;
    {
        Vec2 qc = Vec2::Zero(), tc = Vec2::Zero();
        for (size_t k = 0; k < handles_.size(); ++k) {
            qc += rest[handles_[k]];
            tc += handle_targets[k];
        }
        qc /= static_cast<double>(handles_.size());
        tc /= static_cast<double>(handles_.size());
        double c = 0, d = 0;
        for (size_t k = 0; k < handles_.size(); ++k) {
            const Vec2 q = rest[handles_[k]] - qc;
            const Vec2 t = handle_targets[k] - tc;
            c += cross2(q, t);
            d += q.dot(t);
        }
        const double theta = (c == 0.0 && d == 0.0) ? 0.0 : std::atan2(c, d);
        const Eigen::Matrix2d r = rot(theta);
        for (int v = 0; v < n; ++v) result.positions[v] = r * (rest[v] - qc) + tc;
    }
    for (size_t k = 0; k < handles_.size(); ++k) result.positions[handles_[k]] = handle_targets[k];

    const int nf = static_cast<int>(free_vertices_.size());
    Eigen::MatrixX2d coupling = l_free_handle_ * ph;

    double prev_energy = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options_.max_iterations; ++iter) {
        const std::vector<double> theta =
            fit_rotations(mesh_, weights_, rest, result.positions);

        Eigen::MatrixX2d b = Eigen::MatrixX2d::Zero(nf, 2);
        std::vector<double> cs(n), sn(n);
        for (int v = 0; v < n; ++v) {
            cs[v] = std::cos(theta[v]);
            sn[v] = std::sin(theta[v]);
        }
        for (size_t k = 0; k < mesh_.edges.size(); ++k) {
            const auto [i, j] = mesh_.edges[k];
            const Vec2 e = rest[i] - rest[j];
            const double c = cs[i] + cs[j], s = sn[i] + sn[j];
            const Vec2 re(0.5 * weights_.w[k] * (c * e.x() - s * e.y()),
                          0.5 * weights_.w[k] * (s * e.x() + c * e.y()));
            if (free_index_[i] >= 0) b.row(free_index_[i]) += re.transpose();
            if (free_index_[j] >= 0) b.row(free_index_[j]) -= re.transpose();
        }
        b -= coupling;

        double max_move = 0;
        if (nf > 0) {
            Eigen::MatrixX2d pf = solver_.solve(b);
            for (int fi = 0; fi < nf; ++fi) {
                const int v = free_vertices_[fi];
                const Vec2 np(pf(fi, 0), pf(fi, 1));
                max_move = std::max(max_move, (np - result.positions[v]).norm());
                result.positions[v] = np;
            }
        }

        result.iterations = iter + 1;
        const double e = energy(mesh_, weights_, rest, result.positions);
        result.energy_per_iteration.push_back(e);
        result.energy = e;
        if (!std::isfinite(e)) throw std::runtime_error("ArapSystem: non-finite energy");
        if (max_move < options_.tolerance) break;
        if (e >= prev_energy - 1e-14 * std::max(1.0, prev_energy) && iter > 0) break;
        prev_energy = e;
    }
    return result;
}

std::vector<double> ArapSystem::triangle_rigidity_residuals(const CharacterMesh& mesh,
                                                            const std::vector<Vec2>& rest,
                                                            const std::vector<Vec2>& deformed) {
    std::vector<double> residuals;
    residuals.reserve(mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        double c = 0, d = 0, rest_len = 0;
        for (int e = 0; e < 3; ++e) {
            const Vec2 re = rest[t[(e + 1) % 3]] - rest[t[e]];
            const Vec2 de = deformed[t[(e + 1) % 3]] - deformed[t[e]];
            c += cross2(re, de);
            d += re.dot(de);
            rest_len += re.squaredNorm();
        }
        const double theta = (c == 0.0 && d == 0.0) ? 0.0 : std::atan2(c, d);
        const Eigen::Matrix2d r = rot(theta);
        double err = 0;
        for (int e = 0; e < 3; ++e) {
            const Vec2 re = rest[t[(e + 1) % 3]] - rest[t[e]];
            const Vec2 de = deformed[t[(e + 1) % 3]] - deformed[t[e]];
            err += (de - r * re).squaredNorm();
        }
        residuals.push_back(rest_len > 0 ? err / rest_len : 0.0);
    }
    return residuals;
}

}  // namespace charanim
