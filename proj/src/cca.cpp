#include "ssvep/cca.hpp"

#include "ssvep/error.hpp"
#include "ssvep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssvep {

namespace {

// Orthonormal basis of the template's column space (N_t x rank).
Matrix column_basis(const Matrix& y)
{
    Eigen::ColPivHouseholderQR<Matrix> qr(y);
    const Eigen::Index rank = qr.rank();
    if (rank == 0)
        fail(ErrorKind::invalid_input, "cca_rho: reference template has rank 0");
    Matrix basis = Matrix::Identity(y.rows(), rank);
    return qr.householderQ() * basis;
}

} // namespace

double cca_rho(const Trial& trial, const ReferenceTemplate& reference)
{
    const Matrix& x = trial.samples;
    const Matrix& y = reference.matrix;
    if (x.cols() != y.rows()) {
        std::ostringstream msg;
        msg << "cca_rho: trial has " << x.cols() << " samples but template has " << y.rows();
        fail(ErrorKind::invalid_input, msg.str());
    }
    if (x.size() == 0)
        fail(ErrorKind::invalid_input, "cca_rho: empty trial");

    // X Y^T (Y Y^T)^-1 Y X^T with Y in (2 N_h x N_t) orientation equals X P X^T,
    // P the orthogonal projector onto the template columns.
    const Matrix projected = x * column_basis(y);
    linalg::SymmetricPencil pencil;
    pencil.numerator = projected * projected.transpose();
    pencil.denominator = x * x.transpose();
    const double lambda = linalg::gen_eig_max(pencil).lambda;
    return std::sqrt(std::clamp(lambda, 0.0, 1.0));
}

CcaResult cca_classify(const Trial& trial, const ReferenceDictionary& dictionary, Execution exec)
{
    CcaResult out;
    out.rho.resize(dictionary.n_stimuli());
    for_each_index(exec, static_cast<std::size_t>(dictionary.n_stimuli()), [&](std::size_t s) {
        out.rho(static_cast<Eigen::Index>(s)) = cca_rho(trial, dictionary.template_of(static_cast<int>(s)));
    });
    Eigen::Index best = 0;
    for (Eigen::Index s = 1; s < out.rho.size(); ++s)
        if (out.rho(s) > out.rho(best))
            best = s;
    out.predicted = static_cast<int>(best);
    return out;
}

} // namespace ssvep
