//! Convolution, Toeplitz matrices, rank and Hermitian solves.

use dlcstc::corelin::{convolve, ldl_hermitian, matrix_rank, toeplitz_of, Cholesky, ComplexMatrix, ComplexSeq, RANK_REL_TOL};
use num_complex::Complex64;

fn main() -> dlcstc::Result<()> {
    let h = ComplexSeq::from_real(&[1.0, 0.5, 0.25]);
    let x = ComplexSeq::from_real(&[1.0, -1.0, 2.0, 0.0]);
    let y = convolve(&h, &x)?;
    println!("h * x      = {:?}", y.iter().map(|z| z.re).collect::<Vec<_>>());

    // The same product as a matrix-vector multiply.
    let t = toeplitz_of(&h, x.len())?;
    let y2 = t.mul_vec(&x)?;
    println!("|conv - Tx| = {:.1e}", y.max_abs_diff(&y2));
    println!("rank(T)    = {}", matrix_rank(&t, RANK_REL_TOL)?);

    // A = T^H T + I is Hermitian positive definite.
    let mut a = t.gram();
    a.add_diagonal(1.0);
    let chol = Cholesky::new(&a)?;
    let b = ComplexMatrix::from_rows(&[ComplexSeq::from_real(&[1.0, 2.0, 3.0, 4.0])]).adjoint();
    let sol = chol.solve(&b)?;
    let back = a.matmul(&sol)?;
    println!("|A A^-1 b - b| = {:.1e}", back.max_abs_diff(&b));

    let ldl = ldl_hermitian(&a)?;
    let d: Vec<f64> = ldl.d.iter().map(|v: &f64| (v * 1e3).round() / 1e3).collect();
    println!("LDL^H pivots = {d:?}");

    let rank_one = ComplexMatrix::from_rows(&[
        ComplexSeq::new(vec![Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)]),
        ComplexSeq::new(vec![Complex64::new(2.0, 2.0), Complex64::new(4.0, 0.0)]),
    ]);
    println!("rank of a rank-one 2x2 = {}", matrix_rank(&rank_one, RANK_REL_TOL)?);
    Ok(())
}
