//! Generalized Gell-Mann basis of `su(d)`, normalized so that it is
//! orthonormal for the rescaled inner product `<A, B> = Tr(AB) / (d(d-1))`.
//!
//! Order of the `d^2 - 1` elements:
//!
//! 1. for each `j < k` (lexicographic), the symmetric element
//!    `|j><k| + |k><j|` followed by the antisymmetric element
//!    `-i|j><k| + i|k><j|`;
//! 2. for `l = 1, ..., d-1`, the diagonal element
//!    `sqrt(2 / (l(l+1))) (sum_{j<l} |j><j| - l |l><l|)`.
//!
//! Each is then multiplied by `sqrt(d(d-1)/2)`. This chart is used to turn
//! real coordinate vectors into Bloch elements (random sampling, the
//! canonical simplex) and, in reverse, by the linear state reconstruction.

use num_complex::Complex64;

use crate::linalg::CMatrix;

/// The `d^2 - 1` basis matrices in the documented order.
pub fn basis(d: usize) -> Vec<CMatrix> {
    let scale = ((d * (d - 1)) as f64 / 2.0).sqrt();
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = Complex64::new(scale, 0.0);
            sym[(k, j)] = Complex64::new(scale, 0.0);
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = Complex64::new(0.0, -scale);
            anti[(k, j)] = Complex64::new(0.0, scale);
            out.push(anti);
        }
    }
    for l in 1..d {
        let w = scale * (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = Complex64::new(w, 0.0);
        }
        diag[(l, l)] = Complex64::new(-(l as f64) * w, 0.0);
        out.push(diag);
    }
    out
}

/// `sum_a coords[a] G_a`.
pub fn combine(basis: &[CMatrix], coords: &[f64]) -> CMatrix {
    assert_eq!(basis.len(), coords.len());
    let d = basis[0].nrows();
    let mut m = CMatrix::zeros(d, d);
    for (g, &x) in basis.iter().zip(coords) {
        m += g.scale(x);
    }
    m
}

/// Coordinates `<G_a, m>` of a traceless Hermitian matrix.
pub fn coordinates(basis: &[CMatrix], m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let norm = (d * (d - 1)) as f64;
    basis
        .iter()
        .map(|g| crate::linalg::trace_of_product(g, m).re / norm)
        .collect()
}
