#pragma once
#include <stdexcept>
#include <string>

namespace patchpert {

struct SeparationViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedGeometry : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MeshFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularEvaluation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SourceTooCloseToBoundary : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace patchpert
