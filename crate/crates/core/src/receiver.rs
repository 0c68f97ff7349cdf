//! Destination: branch superposition, matrix model, detection.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{ChannelRealization, NoiseSpec};
use crate::codegen::{Branch, GeneratorMatrix};
use crate::config::SchemeConfig;
use crate::corelin::{convolve_window, ldl_hermitian, Cholesky, ComplexMatrix, ComplexSeq, ZERO};
use crate::error::{Error, Result};
use crate::modem::{Constellation, Frame};
use crate::relaysim::RelayTrace;
use crate::rng::complex_gaussian;

/// Largest frame [`ml_detect`] will enumerate.
pub const ML_MAX_SYMBOLS: usize = 6;

/// `y = H s + n` over one receive window, with `E[n n^H] = noise_cov`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalentModel {
    pub h_matrix: ComplexMatrix,
    pub noise_cov: ComplexMatrix,
    pub window_len: usize,
}

/// Feedback source for the decision-feedback stage.
#[derive(Clone, Debug, PartialEq)]
pub enum Feedback {
    Decision,
    /// Feeds back the true symbols. Only useful as a bound.
    Genie(ComplexSeq),
}

/// Receive gain and arrival delay of a branch.
pub fn branch_path(branch: Branch, ch: &ChannelRealization) -> (Complex64, usize) {
    match branch {
        Branch::Relay(k) => (ch.h_rd[k], ch.dst_delays[k]),
        Branch::Direct => (ch.h_sd, ch.dst_delay_direct),
    }
}

fn check_delays(ch: &ChannelRealization, tau_max: usize) -> Result<()> {
    let worst = ch.dst_delays[0].max(ch.dst_delays[1]).max(ch.dst_delay_direct);
    if worst >= tau_max.max(1) {
        return Err(Error::Precondition(format!(
            "destination delay {worst} not below tau_max = {tau_max}"
        )));
    }
    Ok(())
}

/// `y(i) = sum_b g_b s_b(i - d_b) + w_D(i)` over `window` samples. Always
/// draws `window` noise samples.
pub fn superpose<R: Rng + ?Sized>(
    parts: &[(Complex64, usize, &ComplexSeq)],
    window: usize,
    noise: &NoiseSpec,
    rng: &mut R,
) -> ComplexSeq {
    let mut y: ComplexSeq = (0..window).map(|_| complex_gaussian(rng, noise.sigma2_dest)).collect();
    for &(gain, delay, s) in parts {
        for (i, &v) in s.iter().enumerate() {
            if let Some(o) = y.get_mut(i + delay) {
                *o += gain * v;
            }
        }
    }
    y
}

/// Two-relay superposition over `N + p + tau_max - 1` samples.
pub fn assemble_destination<R: Rng + ?Sized>(
    trace: &RelayTrace,
    ch: &ChannelRealization,
    noise: &NoiseSpec,
    tau_max: usize,
    rng: &mut R,
) -> Result<ComplexSeq> {
    check_delays(ch, tau_max)?;
    let len = trace.transmitted[0].len();
    let parts: Vec<_> = (0..2)
        .map(|k| (ch.h_rd[k], ch.dst_delays[k], &trace.transmitted[k]))
        .collect();
    Ok(superpose(&parts, len + tau_max.max(1) - 1, noise, rng))
}

/// Superposition over every branch of `g`, including a direct branch, whose
/// transmitted samples are the source frame shaped by its signal row.
pub fn assemble_branches<R: Rng + ?Sized>(
    g: &GeneratorMatrix,
    trace: &RelayTrace,
    frame: &Frame,
    ch: &ChannelRealization,
    noise: &NoiseSpec,
    cfg: &SchemeConfig,
    rng: &mut R,
) -> Result<ComplexSeq> {
    check_delays(ch, cfg.tau_max())?;
    let len = frame.len();
    let direct: Vec<(usize, ComplexSeq)> = g
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| **b == Branch::Direct)
        .map(|(i, _)| (i, convolve_window(&g.signal_rows[i], &frame.padded, len)))
        .collect();
    let mut parts = Vec::with_capacity(g.branches.len());
    for (i, &b) in g.branches.iter().enumerate() {
        let (gain, delay) = branch_path(b, ch);
        let samples = match b {
            Branch::Relay(k) => &trace.transmitted[k],
            Branch::Direct => &direct.iter().find(|(j, _)| *j == i).expect("collected above").1,
        };
        parts.push((gain, delay, samples));
    }
    Ok(superpose(&parts, cfg.receive_len(), noise, rng))
}

/// Matrix form of one frame: signal and noise paths through every branch,
/// each cut to the relay window before the destination delay.
pub fn equivalent_model(
    g: &GeneratorMatrix,
    ch: &ChannelRealization,
    noise: &NoiseSpec,
    cfg: &SchemeConfig,
) -> Result<EquivalentModel> {
    if g.signal_rows.len() != g.branches.len() || g.noise_rows.len() != g.branches.len() {
        return Err(Error::Dimension(format!(
            "{} branches, {} signal rows, {} noise rows",
            g.branches.len(),
            g.signal_rows.len(),
            g.noise_rows.len()
        )));
    }
    check_delays(ch, cfg.tau_max())?;
    let n = cfg.n;
    let len = cfg.frame_len();
    let w = cfg.receive_len();

    let mut h = ComplexMatrix::zeros(w, n);
    for (b, &branch) in g.branches.iter().enumerate() {
        let (gain, d) = branch_path(branch, ch);
        for (o, v) in g.signal_rows[b].taps() {
            for col in 0..n.min(len.saturating_sub(o)) {
                h[(col + o + d, col)] += gain * v;
            }
        }
    }

    let mut cov = ComplexMatrix::identity(w);
    cov.scale(Complex64::new(noise.sigma2_dest, 0.0));
    if noise.sigma2_relay > 0.0 {
        for j in 0..2 {
            let mut gj = ComplexMatrix::zeros(w, len);
            let mut any = false;
            for (b, &branch) in g.branches.iter().enumerate() {
                let (gain, d) = branch_path(branch, ch);
                for (o, v) in g.noise_rows[b][j].taps() {
                    any = true;
                    for col in 0..len.saturating_sub(o) {
                        gj[(col + o + d, col)] += gain * v;
                    }
                }
            }
            if any {
                let mut part = gj.outer_gram();
                part.scale(Complex64::new(noise.sigma2_relay, 0.0));
                cov.add_assign(&part)?;
            }
        }
    }
    Ok(EquivalentModel {
        h_matrix: h,
        noise_cov: cov,
        window_len: w,
    })
}

/// Whitened channel and observation: `(L^{-1} H, L^{-1} y)` with
/// `noise_cov = L L^H`.
fn whiten(y: &[Complex64], model: &EquivalentModel) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    if y.len() != model.window_len || model.h_matrix.rows() != model.window_len {
        return Err(Error::Dimension(format!(
            "observation of {} samples, model window {}",
            y.len(),
            model.window_len
        )));
    }
    let chol = Cholesky::new(&model.noise_cov)?;
    let hw = chol.solve_lower_mat(&model.h_matrix)?;
    let mut yw = y.to_vec();
    chol.solve_lower_in_place(&mut yw);
    Ok((hw, yw))
}

/// Block MMSE-DFE.
///
/// With whitened `H_w`, `y_w` and `A = H_w^H H_w + I / E_s = L^H D L`
/// (`L` unit lower triangular), the MMSE cost is
/// `sum_i d_i |[L (s - z)]_i|^2` for `z = A^{-1} H_w^H y_w`. Row `i` of
/// `L (s - z)` involves only symbols `m <= i`, so symbols are decided first
/// to last and each decision feeds the next through the strictly lower part
/// of `L`. The first symbol is the one whose code taps are never cut by the
/// end of the relay window.
pub fn mmse_dfe_detect(
    y: &[Complex64],
    model: &EquivalentModel,
    constellation: &Constellation,
    feedback: &Feedback,
) -> Result<ComplexSeq> {
    let (hw, yw) = whiten(y, model)?;
    let n = hw.cols();
    if let Feedback::Genie(s) = feedback {
        if s.len() != n {
            return Err(Error::Dimension(format!("genie symbols {} vs N = {n}", s.len())));
        }
    }
    let mut a = hw.gram();
    a.add_diagonal(1.0 / constellation.energy());
    let rhs = hw.adjoint().mul_vec(&yw)?;

    // L^H D L of A is the reversal of the L D L^H factorization of J A J.
    let rev = |i: usize| n - 1 - i;
    let mut ja = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            ja[(i, j)] = a[(rev(i), rev(j))];
        }
    }
    let ldl = ldl_hermitian(&ja)?;
    let lr = &ldl.l;
    // Unit lower factor of A: l(i, m) for m < i.
    let l = |i: usize, m: usize| lr[(rev(m), rev(i))].conj();
    let d = |i: usize| ldl.d[rev(i)];

    // z = A^{-1} rhs = L^{-1} D^{-1} L^{-H} rhs
    let mut z = rhs.into_inner();
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in i + 1..n {
            s -= l(k, i).conj() * z[k];
        }
        z[i] = s;
    }
    for (i, zi) in z.iter_mut().enumerate() {
        *zi /= d(i);
    }
    for i in 0..n {
        let mut s = z[i];
        for k in 0..i {
            s -= l(i, k) * z[k];
        }
        z[i] = s;
    }

    let mut decided = vec![ZERO; n];
    let mut fed = vec![ZERO; n];
    for i in 0..n {
        let mut v = z[i];
        for m in 0..i {
            v -= l(i, m) * (fed[m] - z[m]);
        }
        decided[i] = constellation.slice(v);
        fed[i] = match feedback {
            Feedback::Decision => decided[i],
            Feedback::Genie(s) => s[i],
        };
    }
    Ok(decided.into())
}

/// Exhaustive search for the sequence minimizing
/// `(y - H s)^H R^{-1} (y - H s)`.
pub fn ml_detect(y: &[Complex64], model: &EquivalentModel, constellation: &Constellation) -> Result<ComplexSeq> {
    let n = model.h_matrix.cols();
    if n > ML_MAX_SYMBOLS {
        return Err(Error::FrameTooLong(n));
    }
    let (hw, yw) = whiten(y, model)?;
    let pts = constellation.points();
    let m = pts.len();
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    let mut best_idx = idx.clone();
    let mut resid = vec![ZERO; yw.len()];
    loop {
        resid.copy_from_slice(&yw);
        for (col, &i) in idx.iter().enumerate() {
            let s = pts[i];
            for (row, r) in resid.iter_mut().enumerate() {
                *r -= hw[(row, col)] * s;
            }
        }
        let metric: f64 = resid.iter().map(|r| r.norm_sqr()).sum();
        if metric < best {
            best = metric;
            best_idx.copy_from_slice(&idx);
        }
        // Last symbol varies fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best_idx.iter().map(|&i| pts[i]).collect());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_realization;
    use crate::codegen::{build_generators, solve_amplifiers};
    use crate::config::Scheme;
    use crate::modem::{build_frame, qpsk_modulate, random_bits};
    use crate::relaysim::simulate_relays_with;
    use crate::rng::{derive_seed, rng_for};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn superposition_and_delay() {
        let mut ch = ChannelRealization::flat();
        ch.h_rd = [c(2.0, 0.0), c(0.0, 1.0)];
        let t0 = ComplexSeq::from_real(&[1.0, 2.0, 3.0]);
        let t1 = ComplexSeq::from_real(&[1.0, 1.0, 1.0]);
        let trace = RelayTrace {
            transmitted: [t0.clone(), t1.clone()],
            received_clean: [t0.clone(), t1.clone()],
            relay_noise: [ComplexSeq::zeros(3), ComplexSeq::zeros(3)],
            per_index_snr: None,
        };
        let quiet = NoiseSpec::noiseless();
        let y = assemble_destination(&trace, &ch, &quiet, 1, &mut rng_for(0, 0)).unwrap();
        let want: Vec<_> = (0..3).map(|i| c(2.0, 0.0) * t0[i] + c(0.0, 1.0) * t1[i]).collect();
        assert_eq!(&*y, &want[..]);

        ch.dst_delays = [1, 0];
        let y = assemble_destination(&trace, &ch, &quiet, 2, &mut rng_for(0, 0)).unwrap();
        assert_eq!(y.len(), 4);
        assert_eq!(y[0], c(0.0, 1.0));
        assert_eq!(y[3], c(6.0, 0.0));
        assert!(assemble_destination(&trace, &ch, &quiet, 1, &mut rng_for(0, 0)).is_err());
    }

    #[test]
    fn model_reproduces_noiseless_pipeline() {
        let noise = NoiseSpec::noiseless();
        for scheme in Scheme::ALL {
            let cfg = SchemeConfig::new(scheme);
            for i in 0..30 {
                let ch = draw_realization(derive_seed(21, i), &cfg.delays);
                let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
                let g = build_generators(&cfg, &ch, &amps).unwrap();
                let mut rng = rng_for(i, 9);
                let s = qpsk_modulate(&random_bits(&mut rng, 2 * cfg.n)).unwrap();
                let frame = build_frame(s.clone(), cfg.p).unwrap();
                let zero = [ComplexSeq::zeros(frame.len()), ComplexSeq::zeros(frame.len())];
                let trace = simulate_relays_with(&cfg, &frame, &ch, &amps, &zero).unwrap();
                let y = assemble_branches(&g, &trace, &frame, &ch, &noise, &cfg, &mut rng).unwrap();
                let model = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
                let hs = model.h_matrix.mul_vec(&s).unwrap();
                assert!(hs.max_abs_diff(&y) < 1e-9, "{scheme}");
                assert!(model.noise_cov.max_abs_diff(&ComplexMatrix::zeros(y.len(), y.len())) == 0.0);
            }
        }
    }

    #[test]
    fn noise_cov_is_hermitian_with_floor() {
        let noise = NoiseSpec::from_snr_db(10.0, 12.0);
        let cfg = SchemeConfig::new(Scheme::FdCrosstalk);
        let ch = draw_realization(5, &cfg.delays);
        let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
        let g = build_generators(&cfg, &ch, &amps).unwrap();
        let m = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
        assert!(m.noise_cov.max_abs_diff(&m.noise_cov.adjoint()) < 1e-12);
        let mut rest = m.noise_cov.clone();
        rest.add_diagonal(-noise.sigma2_dest);
        // PSD check through a shifted Cholesky.
        rest.add_diagonal(1e-12);
        Cholesky::new(&rest).unwrap();
    }

    #[test]
    fn dfe_recovers_noiseless_frames() {
        let noise = NoiseSpec::from_snr_db(150.0, 150.0);
        let q = Constellation::qpsk();
        for scheme in [Scheme::FdCrosstalk, Scheme::FdLoop, Scheme::Hd, Scheme::SelfCoding, Scheme::Direct] {
            let cfg = SchemeConfig::new(scheme);
            for i in 0..20 {
                let ch = draw_realization(derive_seed(31, i), &cfg.delays);
                let amps = solve_amplifiers(&cfg, &ch, &noise).unwrap();
                let g = build_generators(&cfg, &ch, &amps).unwrap();
                let mut rng = rng_for(i, 4);
                let s = qpsk_modulate(&random_bits(&mut rng, 2 * cfg.n)).unwrap();
                let y = equivalent_model(&g, &ch, &NoiseSpec::noiseless(), &cfg)
                    .unwrap()
                    .h_matrix
                    .mul_vec(&s)
                    .unwrap();
                let model = equivalent_model(&g, &ch, &noise, &cfg).unwrap();
                let shat = mmse_dfe_detect(&y, &model, &q, &Feedback::Decision).unwrap();
                assert!(shat.max_abs_diff(&s) < 1e-12, "{scheme} draw {i}");
            }
        }
    }

    #[test]
    fn ml_on_identity_is_nearest_point() {
        let q = Constellation::qpsk();
        let model = EquivalentModel {
            h_matrix: ComplexMatrix::identity(3),
            noise_cov: ComplexMatrix::identity(3),
            window_len: 3,
        };
        let y = [c(0.3, -2.0), c(-0.1, 0.1), c(5.0, 5.0)];
        let s = ml_detect(&y, &model, &q).unwrap();
        let want: Vec<_> = y.iter().map(|&v| q.slice(v)).collect();
        assert_eq!(&*s, &want[..]);
    }

    #[test]
    fn ml_attains_global_minimum() {
        let q = Constellation::qpsk();
        let mut rng = rng_for(77, 0);
        let mut h = ComplexMatrix::zeros(5, 3);
        for i in 0..5 {
            for j in 0..3 {
                h[(i, j)] = complex_gaussian(&mut rng, 1.0);
            }
        }
        let mut r = ComplexMatrix::identity(5);
        r[(1, 0)] = c(0.3, 0.1);
        r[(0, 1)] = c(0.3, -0.1);
        let model = EquivalentModel {
            h_matrix: h.clone(),
            noise_cov: r.clone(),
            window_len: 5,
        };
        let y: Vec<_> = (0..5).map(|_| complex_gaussian(&mut rng, 2.0)).collect();
        let s = ml_detect(&y, &model, &q).unwrap();
        // Independent metric: solve R v = e by the generic solver.
        let metric = |s: &[Complex64]| {
            let hs = h.mul_vec(s).unwrap();
            let e: Vec<_> = y.iter().zip(hs.iter()).map(|(a, b)| a - b).collect();
            let em = ComplexMatrix::from_row_major(5, 1, e.clone()).unwrap();
            let v = crate::corelin::hermitian_solve(&r, &em).unwrap();
            e.iter().enumerate().map(|(i, ei)| (ei.conj() * v[(i, 0)]).re).sum::<f64>()
        };
        let best = metric(&s);
        let p = q.points();
        for a in p {
            for b in p {
                for cc in p {
                    assert!(metric(&[*a, *b, *cc]) >= best - 1e-9);
                }
            }
        }
        let big = EquivalentModel {
            h_matrix: ComplexMatrix::zeros(7, 7),
            noise_cov: ComplexMatrix::identity(7),
            window_len: 7,
        };
        assert_eq!(ml_detect(&[ZERO; 7], &big, &q), Err(Error::FrameTooLong(7)));
    }

    #[test]
    fn non_pd_covariance_is_an_error() {
        let model = EquivalentModel {
            h_matrix: ComplexMatrix::identity(2),
            noise_cov: ComplexMatrix::zeros(2, 2),
            window_len: 2,
        };
        let r = mmse_dfe_detect(&[ZERO; 2], &model, &Constellation::qpsk(), &Feedback::Decision);
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }
}
