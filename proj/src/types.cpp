#include "interferolab/types.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace interferolab {

double unitarity_defect(const ComplexMatrix& u) {
    ComplexMatrix gram = u.adjoint() * u;
    gram -= ComplexMatrix::Identity(u.cols(), u.cols());
    return gram.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

bool all_finite(const RealMatrix& m) {
    return m.allFinite();
}

void PhaseConfig::validate() const {
    if (values.rows() < 1 || values.cols() < 1)
        throw ShapeError("phase config must be at least 1x1");
    if (!all_finite(values))
        throw DomainError("phase config contains non-finite values");
}

void Architecture::validate() const {
    if (modes < 1)
        throw DomainError("architecture needs at least one mode");
    if (phase_layers < 2)
        throw DomainError("architecture needs at least two phase layers");
    if (static_cast<int>(basis.size()) != phase_layers - 1)
        throw ShapeError("architecture needs exactly phase_layers-1 basis matrices");
    for (const ComplexMatrix& u : basis) {
        if (u.rows() != modes || u.cols() != modes)
            throw ShapeError("basis matrix shape does not match mode count");
        if (!all_finite(u))
            throw DomainError("basis matrix contains non-finite entries");
        if (unitarity_defect(u) >= 1e-10)
            throw DomainError("basis matrix is not unitary within 1e-10");
    }
}

namespace {

// FNV-1a over the raw bytes of the architecture content.
struct Fnv1a {
    std::uint64_t state = 0xCBF29CE484222325ULL;

    void feed(std::uint64_t word) {
        for (int b = 0; b < 8; ++b) {
            state ^= (word >> (8 * b)) & 0xFF;
            state *= 0x100000001B3ULL;
        }
    }
    void feed(double d) { feed(std::bit_cast<std::uint64_t>(d)); }
};

}  // namespace

std::string Architecture::hash() const {
    Fnv1a h;
    h.feed(static_cast<std::uint64_t>(modes));
    h.feed(static_cast<std::uint64_t>(phase_layers));
    for (const ComplexMatrix& u : basis)
        for (Eigen::Index i = 0; i < u.rows(); ++i)
            for (Eigen::Index j = 0; j < u.cols(); ++j) {
                h.feed(u(i, j).real());
                h.feed(u(i, j).imag());
            }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h.state));
    return std::string(buf);
}

void TrainingSet::validate() const {
    if (samples.empty())
        throw DomainError("training set must contain at least one sample");
    if (noise_eps < 0)
        throw DomainError("noise level must be nonnegative");
    const int n = modes();
    const int l = layers();
    for (const TrainingSample& s : samples) {
        if (s.matrix.rows() != n || s.matrix.cols() != n)
            throw ShapeError("training sample matrix is not NxN");
        if (s.phases.layers() != l || s.phases.channels() != n)
            throw ShapeError("training sample phases are not LxN");
        s.phases.validate();
        if (!all_finite(s.matrix))
            throw DomainError("training sample matrix contains non-finite entries");
    }
}

}  // namespace interferolab
