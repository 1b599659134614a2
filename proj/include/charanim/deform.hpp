#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <map>
#include <vector>

#include "charanim/mesh.hpp"
#include "charanim/taxonomy.hpp"

namespace charanim {

/// One weight per mesh edge, same order as mesh.edges:
/// w_ij = alpha(L_i) + alpha(L_j).
struct EdgeWeights {
    std::vector<double> w;
};

EdgeWeights compute_edge_weights(const CharacterMesh& mesh, const LabelTaxonomy& taxonomy);

struct ArapOptions {
    double tolerance = 1e-4;  // max per-vertex displacement between iterations
    int max_iterations = 100;
};

struct ArapResult {
    std::vector<Vec2> positions;
    std::vector<double> energy_per_iteration;  // non-increasing
    int iterations = 0;
    double energy = 0;  // final
};

/// Weighted as-rigid-as-possible system over a fixed mesh and handle index
/// set. The global Laplacian is prefactorized on construction; solves for
/// different handle targets and rest geometries reuse the factorization.
/// Immutable after construction, so concurrent solve() calls are safe.
class ArapSystem {
public:
    ArapSystem(const CharacterMesh& mesh, const EdgeWeights& weights,
               std::vector<int> handle_indices, ArapOptions options = {});

    /// Deforms the rest mesh so each handle lands exactly on its target.
    /// An alternative rest geometry (same topology) may be supplied, which
    /// is how per-frame foot-corrected geometry is solved without refactoring.
    ArapResult solve(const std::vector<Vec2>& handle_targets,
                     const std::vector<Vec2>* rest_override = nullptr) const;

    /// The objective being minimized: sum over vertices i and incident
    /// edges (i,j) of w_ij |p'_i - p'_j - R_i (p_i - p_j)|^2, with each R_i
    /// the optimal rotation for cell i. Exposed so tests can check the
    /// solver against independent minimizers of the identical objective.
    static double energy(const CharacterMesh& mesh, const EdgeWeights& weights,
                         const std::vector<Vec2>& rest, const std::vector<Vec2>& deformed);

    /// Optimal cell rotation angles for a given deformed state.
    static std::vector<double> fit_rotations(const CharacterMesh& mesh,
                                             const EdgeWeights& weights,
                                             const std::vector<Vec2>& rest,
                                             const std::vector<Vec2>& deformed);

    const std::vector<int>& handles() const { return handles_; }

    /// Per-triangle deviation from rigidity: residual of the best rigid fit
    /// of the triangle's deformed edges to its rest edges, normalized by
    /// the rest edge lengths.
    static std::vector<double> triangle_rigidity_residuals(const CharacterMesh& mesh,
                                                           const std::vector<Vec2>& rest,
                                                           const std::vector<Vec2>& deformed);

private:
    const CharacterMesh& mesh_;
    EdgeWeights weights_;
    std::vector<int> handles_;
    ArapOptions options_;
    std::vector<int> free_index_;     // vertex -> index among free vertices, -1 for handles
    std::vector<int> free_vertices_;  // free index -> vertex
    std::vector<std::vector<std::pair<int, double>>> adjacency_;  // vertex -> (nbr, w)
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver_;
    Eigen::SparseMatrix<double> l_free_handle_;  // coupling block, free x handle
};

}  // namespace charanim
