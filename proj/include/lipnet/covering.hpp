#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipnet/box.hpp"
#include "lipnet/lattice.hpp"
#include "lipnet/network.hpp"
#include "lipnet/norm.hpp"
#include "lipnet/pipeline.hpp"

namespace lipnet {

/// Finite family of L-Lipschitz functions on hat_box vanishing at its lower
/// corner: multilinear interpolants of lattice values that are multiples of
/// `quantum`, with every lattice cell L-Lipschitz.
struct EpsNet {
  std::vector<SampledFunction> elements;
  double epsilon = 0.0;
  double L = 0.0;
  BoxDomain hat_box;
  NormSpec norm;
  /// Cells per axis; 0 for the single zero function.
  int cells = 0;
  double spacing = 0.0;
  double quantum = 0.0;
};

/// Lattice spacing h and quantum q are chosen for covering radius <= epsilon/2:
/// in 1D h = epsilon / (2L) rounded down to divide the box, q = L h (slopes
/// in {-L, 0, L}); in 2D h is cut until L h d / 2 + q / 2 <= epsilon / 2 with
/// q = L h / 2. When epsilon >= 2 L diam the net is {0}. Elements are listed
/// in lexicographic order of their lattice values. d must be 1 or 2; more
/// than `cap` elements throws CapacityError.
EpsNet build_eps_net(double L, const BoxDomain& hat_box, double epsilon, const NormSpec& norm,
                     std::size_t cap = 1000000);

/// All admissible elements for a given number of cells per axis and quantum.
/// epsilon is recorded as given.
EpsNet enumerate_eps_net(double L, const BoxDomain& hat_box, int cells, double quantum, const NormSpec& norm,
                         double epsilon, std::size_t cap = 1000000);

/// Sup distance on a measurement lattice between f - f(anchor) and the
/// nearest element. Returns (element index, distance).
std::pair<std::size_t, double> nearest_element(const EpsNet& net, const ScalarFunction& f, int resolution);

/// Largest nearest-element distance over `trials` random L-Lipschitz
/// functions (random walks at a finer spacing in 1D, alternating with random
/// McShane mixtures). The measurement lattice is 8 times finer than the net.
double covering_radius_check(const EpsNet& net, int trials, std::uint64_t seed);

struct ElementRun {
  std::size_t index;
  int width;
  double sup_error;
  bool success;
  std::string failure;
};

struct UniformWidthResult {
  EpsNet net;
  double covering_radius = 0.0;
  std::vector<ElementRun> runs;
  /// Restored networks approximating each element on K within epsilon / 2.
  std::vector<ShallowNet> element_nets;
  int m_uniform = 0;
  bool success = false;
  std::string failure;
};

struct UniformWidthOptions {
  int m_max = 1024;
  int radius_trials = 500;
  std::size_t cap = 1000000;
  PipelineOptions pipeline;
};

/// Builds the net, runs the pipeline at accuracy epsilon / 2 for every element
/// and takes the largest width. Fails on the first element the pipeline
/// cannot handle, or when the measured covering radius exceeds epsilon / 2.
UniformWidthResult uniform_width_experiment(double L, const BoxDomain& K, const BoxDomain& hat_box, double epsilon,
                                            const NormSpec& norm, Activation activation, std::uint64_t seed,
                                            const UniformWidthOptions& options = {});

struct ValidationOutcome {
  int functions = 0;
  double max_error = 0.0;
  bool ok = false;
};

/// Approximates `count` fresh random L-Lipschitz functions f by the stored
/// network of the element nearest to f - f(anchor), shifted by f(anchor), and
/// measures the sup error on a 1001-point (1D) or 101 x 101 (2D) lattice on K.
ValidationOutcome validate_uniform_width(const UniformWidthResult& result, const BoxDomain& K, int count,
                                         std::uint64_t seed);

}  // namespace lipnet
