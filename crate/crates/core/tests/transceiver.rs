use mdofdm::channel::{ChannelConfig, ChannelRealization, KroneckerChannel};
use mdofdm::metrics::compute_papr;
use mdofdm::numerics::{ComplexMatrix, QamConstellation, RandomStream};
use mdofdm::transceiver::{
    apply_channel, md_build_tx, md_equalize, mmse_build_tx, mmse_equalize, select_antenna, select_antennas,
    synthesize_waveform, SelectionMap,
};
use mdofdm::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(s: &mut RandomStream, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| s.complex_gaussian())
}

/// Gauss-Jordan inverse with partial pivoting.
fn explicit_inverse(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|r| {
            (0..2 * n)
                .map(|col| {
                    if col < n {
                        a[(r, col)]
                    } else if col - n == r {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                })
                .collect()
        })
        .collect();
    for p in 0..n {
        let pivot = (p..n).max_by(|&x, &y| m[x][p].norm().total_cmp(&m[y][p].norm())).unwrap();
        m.swap(p, pivot);
        let d = m[p][p];
        for v in m[p].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != p {
                let f = m[r][p];
                let row_p = m[p].clone();
                for (v, pv) in m[r].iter_mut().zip(row_p) {
                    *v -= f * pv;
                }
            }
        }
    }
    ComplexMatrix::from_fn(n, n, |r, col| m[r][col + n])
}

/// `W = (HᴴH + σ²I)⁻¹Hᴴ` with an explicit inverse.
fn mmse_explicit(h: &ComplexMatrix, y: &[Complex64], noise_var: f64) -> Vec<Complex64> {
    let hh = h.adjoint();
    let gram = hh
        .matmul(h)
        .unwrap()
        .add(&ComplexMatrix::identity(h.cols()).scale(c(noise_var, 0.0)))
        .unwrap();
    let w = explicit_inverse(&gram).matmul(&hh).unwrap();
    w.mul_vec(y).unwrap().into_inner()
}

#[test]
fn mmse_matches_explicit_inverse() {
    let mut s = RandomStream::new(31, &[]);
    for _ in 0..200 {
        let h = random_matrix(&mut s, 4, 4);
        let y: Vec<Complex64> = (0..4).map(|_| s.complex_gaussian()).collect();
        let fast = mmse_equalize(&h, &y, 0.1).unwrap();
        let oracle = mmse_explicit(&h, &y, 0.1);
        for (a, b) in fast.iter().zip(&oracle) {
            assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
        }
    }
}

#[test]
fn mmse_rectangular_channel_matches_explicit_inverse() {
    let mut s = RandomStream::new(32, &[]);
    let h = random_matrix(&mut s, 4, 2);
    let y: Vec<Complex64> = (0..4).map(|_| s.complex_gaussian()).collect();
    let fast = mmse_equalize(&h, &y, 0.5).unwrap();
    let oracle = mmse_explicit(&h, &y, 0.5);
    for (a, b) in fast.iter().zip(&oracle) {
        assert!((a - b).norm() <= 1e-10);
    }
}

#[test]
fn zero_forcing_limit_recovers_symbols() {
    let mut s = RandomStream::new(33, &[]);
    for _ in 0..200 {
        let h = random_matrix(&mut s, 4, 4);
        let x: Vec<Complex64> = (0..4).map(|_| s.complex_gaussian()).collect();
        let y = h.mul_vec(&x).unwrap();
        let est = mmse_equalize(&h, &y, 0.0).unwrap();
        for (a, b) in est.iter().zip(&x) {
            assert!((a - b).norm() <= 1e-9);
        }
    }
}

#[test]
fn selection_matches_exhaustive_scan() {
    let mut s = RandomStream::new(34, &[]);
    for _ in 0..1000 {
        let h = random_matrix(&mut s, 4, 4);
        let gains: Vec<f64> = (0..4).map(|j| (0..4).map(|i| h[(i, j)].norm_sqr()).sum()).collect();
        let j = select_antenna(&h);
        assert!(gains.iter().all(|&g| gains[j] >= g));
    }
}

#[test]
fn selection_examples() {
    let h = ComplexMatrix::from_row_major(1, 4, vec![c(1.0, 0.0), c(0.0, 3.0), c(-2.0, 0.0), c(0.3, 0.4)]).unwrap();
    assert_eq!(select_antenna(&h), 1);
    assert_eq!(select_antenna(&ComplexMatrix::from_real(2, 4, &[1.0; 8]).unwrap()), 0);
}

#[test]
fn mmse_frame_power_is_n_tx() {
    let q = QamConstellation::new(4).unwrap();
    let bits = RandomStream::new(35, &[]).bits(4 * 64 * 2);
    let sym = q.modulate(&bits).unwrap();
    let grid = ComplexMatrix::from_fn(4, 64, |j, k| sym[k * 4 + j]);
    let frame = mmse_build_tx(&grid, 4, 64).unwrap();
    for k in 0..64 {
        assert!((frame.column(k).norm_sqr() - 4.0).abs() < 1e-12);
        for j in 0..4 {
            assert_eq!(frame.symbol(j, k), sym[k * 4 + j]);
        }
    }
}

#[test]
fn md_receive_matches_scalar_model() {
    let cfg = ChannelConfig {
        n_tx: 4,
        n_rx: 1,
        n_sc: 16,
        rho_tx: 0.2,
        rho_rx: 0.0,
    };
    let mut s = RandomStream::new(36, &[]);
    let h = KroneckerChannel::new(cfg).unwrap().realize(&mut s);
    let sel = select_antennas(&h);
    let sym: Vec<Complex64> = (0..16).map(|_| s.complex_gaussian()).collect();
    let frame = md_build_tx(&sym, &sel, 4).unwrap();
    let y = apply_channel(&frame, &h, 0.0, &mut s).unwrap();
    for k in 0..16 {
        let expected = h.subcarrier(k)[(0, sel.antenna(k))] * sym[k];
        assert!((y[(0, k)] - expected).norm() < 1e-15);
        assert!((md_equalize(h.subcarrier(k)[(0, sel.antenna(k))], y[(0, k)]) - sym[k]).norm() < 1e-12);
    }
}

#[test]
fn noise_power_matches_variance() {
    let n_sc = 1 << 14;
    let h = ChannelRealization {
        per_subcarrier: vec![ComplexMatrix::identity(1); n_sc],
    };
    let frame = md_build_tx(&vec![c(0.0, 0.0); n_sc], &SelectionMap(vec![0; n_sc]), 1).unwrap();
    let noise_var = 0.37;
    let base = RandomStream::new(37, &[]);
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..64 {
        let y = apply_channel(&frame, &h, noise_var, &mut base.fork(i)).unwrap();
        total += y.entries().iter().map(|v| v.norm_sqr()).sum::<f64>();
        count += n_sc;
    }
    let p = total / count as f64;
    assert!(count >= 1_000_000);
    assert!((p / noise_var - 1.0).abs() < 0.01, "{p}");
}

#[test]
fn noiseless_end_to_end_both_chains() {
    let q = QamConstellation::new(16).unwrap();
    for seed in 0..20 {
        let mut s = RandomStream::new(38, &[seed]);
        // MD, 4×1.
        let cfg = ChannelConfig {
            n_tx: 4,
            n_rx: 1,
            n_sc: 32,
            rho_tx: 0.4,
            rho_rx: 0.0,
        };
        let bits = s.bits(32 * 4);
        let h = KroneckerChannel::new(cfg).unwrap().realize(&mut s);
        let sel = select_antennas(&h);
        let frame = md_build_tx(&q.modulate(&bits).unwrap(), &sel, 4).unwrap();
        let y = apply_channel(&frame, &h, 0.0, &mut s).unwrap();
        let est: Vec<Complex64> = (0..32).map(|k| md_equalize(h.subcarrier(k)[(0, sel.antenna(k))], y[(0, k)])).collect();
        assert_eq!(q.demodulate(&est), bits);

        // MMSE, 4×4.
        let cfg = ChannelConfig { n_rx: 4, ..cfg };
        let bits = s.bits(32 * 4 * 4);
        let sym = q.modulate(&bits).unwrap();
        let grid = ComplexMatrix::from_fn(4, 32, |j, k| sym[k * 4 + j]);
        let frame = mmse_build_tx(&grid, 4, 32).unwrap();
        let h = KroneckerChannel::new(cfg).unwrap().realize(&mut s);
        let y = apply_channel(&frame, &h, 0.0, &mut s).unwrap();
        let mut est = Vec::new();
        for k in 0..32 {
            let yk: Vec<Complex64> = (0..4).map(|r| y[(r, k)]).collect();
            est.extend(mmse_equalize(h.subcarrier(k), &yk, 0.0).unwrap().into_inner());
        }
        assert_eq!(q.demodulate(&est), bits);
    }
}

#[test]
fn single_subcarrier_waveform_has_unit_papr() {
    for amp in [c(1.0, 0.0), c(-3.0, 2.0)] {
        let frame = md_build_tx(
            &[amp, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            &SelectionMap(vec![0; 4]),
            1,
        )
        .unwrap();
        let w = synthesize_waveform(&frame, 4).unwrap();
        let p = compute_papr(&w.per_antenna[0]).unwrap();
        assert!((p.linear - 1.0).abs() < 1e-9);
        assert!(p.db.abs() < 1e-9);
    }
}

#[test]
fn all_ones_grid_papr_is_n_sc() {
    for l in [1, 2, 4, 8] {
        let frame = md_build_tx(&[c(1.0, 0.0); 64], &SelectionMap(vec![0; 64]), 1).unwrap();
        let w = synthesize_waveform(&frame, l).unwrap();
        assert_eq!(w.per_antenna[0].len(), 64 * l);
        // peak |x[0]|² = N²/(LN), mean = N/(LN).
        let peak = w.per_antenna[0][0].norm_sqr();
        assert!((peak - 64.0 / l as f64).abs() < 1e-9);
        let p = compute_papr(&w.per_antenna[0]).unwrap();
        assert!((p.linear - 64.0).abs() < 1e-9, "L={l}: {}", p.linear);
    }
}

proptest! {
    #[test]
    fn prop_md_frame_is_one_hot(seed in any::<u64>(), n_tx in 1usize..6) {
        let mut s = RandomStream::new(seed, &[]);
        let sym: Vec<Complex64> = (0..16).map(|_| s.complex_gaussian()).collect();
        let sel = SelectionMap((0..16).map(|_| (s.uniform() * n_tx as f64) as usize).collect());
        let f = md_build_tx(&sym, &sel, n_tx).unwrap();
        for (k, &x) in sym.iter().enumerate() {
            let nonzero = (0..n_tx).filter(|&j| f.symbol(j, k) != c(0.0, 0.0)).count();
            prop_assert_eq!(nonzero, 1);
            prop_assert_eq!(f.symbol(sel.antenna(k), k), x);
            prop_assert!((f.column(k).norm_sqr() - x.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn prop_selection_scale_invariant(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut s = RandomStream::new(seed, &[]);
        let h = random_matrix(&mut s, 2, 4);
        prop_assert_eq!(select_antenna(&h.scale(c(scale, 0.0))), select_antenna(&h));
    }

    #[test]
    fn prop_waveform_preserves_energy(seed in any::<u64>(), l in prop::sample::select(vec![1usize, 2, 4, 8])) {
        let mut s = RandomStream::new(seed, &[]);
        let grid = random_matrix(&mut s, 3, 32);
        let frame = mmse_build_tx(&grid, 3, 32).unwrap();
        let w = synthesize_waveform(&frame, l).unwrap();
        for a in 0..3 {
            let freq: f64 = frame.antenna_row(a).iter().map(|v| v.norm_sqr()).sum();
            let time: f64 = w.per_antenna[a].iter().map(|v| v.norm_sqr()).sum();
            prop_assert!((freq - time).abs() <= 1e-12 * freq);
        }
    }
}
