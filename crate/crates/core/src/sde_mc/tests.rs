use super::*;
use crate::noise::generate_paths;

fn hurst(h: f64) -> HurstParameter {
    HurstParameter::new(h).unwrap()
}

fn ensembles(
    h: f64,
    dt: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> (PathEnsemble, PathEnsemble) {
    let w = NoiseSpec::new(HurstParameter::BROWNIAN, dt, n_steps, n_paths, seed).unwrap();
    let b = NoiseSpec::new(hurst(h), dt, n_steps, n_paths, seed).unwrap();
    (
        generate_paths(w, NoiseKind::Bm).unwrap(),
        generate_paths(b, NoiseKind::Fbm).unwrap(),
    )
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn deterministic_decay() {
    let model = SdeModel::pure_gwn(SpaceTimeField::linear(-1.0), SpaceTimeField::zero(), 2.0);
    let dt = 0.004;
    let (w, b) = ensembles(0.5, dt, 250, 20, 1);
    let out = integrate(&model, &w, &b, &[0.0, 1.0]).unwrap();
    let exact = 2.0 * (-1.0f64).exp();
    for x in out.at(1) {
        assert!((x - exact).abs() < 2.0 * dt * dt, "{x} vs {exact}");
    }
    assert!(out.at(0).iter().all(|&x| x == 2.0));
}

#[test]
fn ou_transient_variance() {
    let model = SdeModel::pure_gwn(
        SpaceTimeField::linear(-1.0),
        SpaceTimeField::constant(1.0),
        0.0,
    );
    let out = simulate(&model, McSettings::desk(17), &[1.0]).unwrap();
    let xs = out.at(0);
    let (_, var) = mean_var(&xs);
    let exact = 0.5 * (1.0 - (-2.0f64).exp());
    let se = exact * (2.0 / xs.len() as f64).sqrt();
    assert!((var - exact).abs() < 3.0 * se, "{var} vs {exact} (se {se})");
}

#[test]
fn multiplicative_fgn_is_lognormal() {
    let c = 0.5;
    let model = SdeModel::pure_fgn(SpaceTimeField::linear(c), 2.0, hurst(0.8));
    let out = simulate(&model, McSettings::desk(23), &[1.0]).unwrap();
    let logs: Vec<f64> = out.at(0).iter().map(|x| (x / 2.0).ln()).collect();
    let (mean, var) = mean_var(&logs);
    let n = logs.len() as f64;
    let target = c * c;
    assert!(mean.abs() < 3.0 * (target / n).sqrt(), "mean {mean}");
    assert!(
        (var - target).abs() < 3.0 * target * (2.0 / n).sqrt(),
        "var {var}"
    );
}

#[test]
fn heun_weak_error_shrinks_with_dt() {
    // Coupled coarse/fine runs on the same Brownian paths: the successive
    // differences of the terminal second moment must shrink by >= 2.
    let model = SdeModel::pure_gwn(
        SpaceTimeField::linear(-1.0),
        SpaceTimeField::constant(1.0),
        0.0,
    );
    let n_paths = 100_000;
    let fine_dt = 0.025;
    let fine_steps = 40;
    let (fine_w, _) = ensembles(0.5, fine_dt, fine_steps, n_paths, 99);
    let coarsen = |ens: &PathEnsemble, factor: usize| {
        let spec = *ens.spec();
        let n = spec.n_steps / factor;
        let incs: Vec<f64> = ens
            .increments()
            .chunks(factor)
            .map(|c| c.iter().sum())
            .collect();
        let spec = NoiseSpec::new(
            spec.hurst,
            spec.dt * factor as f64,
            n,
            spec.n_paths,
            spec.seed,
        )
        .unwrap();
        PathEnsemble::from_parts(spec, NoiseKind::Bm, incs)
    };
    let second_moment = |ens: &PathEnsemble| {
        let zero = PathEnsemble::from_parts(
            *ens.spec(),
            NoiseKind::Fbm,
            vec![0.0; ens.increments().len()],
        );
        let out = integrate(&model, ens, &zero, &[1.0]).unwrap();
        out.at(0).iter().map(|x| x * x).sum::<f64>() / n_paths as f64
    };
    let m4 = second_moment(&coarsen(&fine_w, 4));
    let m2 = second_moment(&coarsen(&fine_w, 2));
    let m1 = second_moment(&fine_w);
    let d_coarse = (m4 - m2).abs();
    let d_fine = (m2 - m1).abs();
    assert!(d_fine * 2.0 <= d_coarse, "{d_coarse} -> {d_fine}");
}

#[test]
fn heun_matches_wong_zakai_corrected_ito_euler() {
    let (a, b, x0) = (-0.5, 0.5, 1.0);
    let model = SdeModel::pure_gwn(SpaceTimeField::linear(a), SpaceTimeField::linear(b), x0);
    let dt = 0.004;
    let n_paths = 100_000;
    let (w, fb) = ensembles(0.5, dt, 250, n_paths, 5);
    let heun = integrate(&model, &w, &fb, &[1.0]).unwrap().at(0);

    // Itô–Euler with drift f + ½ g g' on independent increments.
    let (w2, _) = ensembles(0.5, dt, 250, n_paths, 6);
    let ito: Vec<f64> = (0..n_paths)
        .map(|p| {
            w2.row(p).iter().fold(x0, |x, &dw| {
                let (f, g, gx) = (a * x, b * x, b);
                x + (f + 0.5 * g * gx) * dt + g * dw
            })
        })
        .collect();
    let (m_h, v_h) = mean_var(&heun);
    let (m_i, v_i) = mean_var(&ito);
    let n = n_paths as f64;
    let se_mean = ((v_h + v_i) / n).sqrt();
    assert!((m_h - m_i).abs() < 4.0 * se_mean, "means {m_h} {m_i}");
    let second = |xs: &[f64]| xs.iter().map(|x| x * x).collect::<Vec<_>>();
    let (s_h, sv_h) = mean_var(&second(&heun));
    let (s_i, sv_i) = mean_var(&second(&ito));
    let se_second = ((sv_h + sv_i) / n).sqrt();
    assert!(
        (s_h - s_i).abs() < 4.0 * se_second,
        "second moments {s_h} {s_i}"
    );
    let exact_mean = (a + 0.5 * b * b).exp();
    assert!((m_h - exact_mean).abs() < 4.0 * (v_h / n).sqrt());
}

#[test]
fn integration_is_reproducible_and_matches_streaming() {
    let model = SdeModel::nonlinear_commutative(
        SpaceTimeField::linear(-1.0),
        SpaceTimeField::linear(0.3),
        SpaceTimeField::linear(0.4),
        1.0,
        hurst(0.7),
    );
    let settings = McSettings {
        dt: 0.01,
        n_paths: 500,
        seed: 77,
    };
    let (w, b) = ensembles(0.7, 0.01, 50, 500, 77);
    let a1 = integrate(&model, &w, &b, &[0.25, 0.5]).unwrap();
    let a2 = integrate(&model, &w, &b, &[0.25, 0.5]).unwrap();
    assert_eq!(a1, a2);
    let s = simulate(&model, settings, &[0.25, 0.5]).unwrap();
    assert_eq!(a1, s);
}

#[test]
fn blowup_names_path_and_time() {
    let f = SpaceTimeField::autonomous(|x| Jet::new(x * x * x, 3.0 * x * x, 6.0 * x));
    let model = SdeModel::pure_gwn(f, SpaceTimeField::zero(), 10.0);
    let (w, b) = ensembles(0.5, 0.1, 100, 4, 1);
    match integrate(&model, &w, &b, &[10.0]) {
        Err(Error::PathBlowup { path, time }) => {
            assert_eq!(path, 0);
            assert!(time > 0.0 && time <= 10.0);
        }
        other => panic!("expected blowup, got {other:?}"),
    }
}

#[test]
fn record_times_must_be_on_grid() {
    let model = SdeModel::pure_gwn(SpaceTimeField::zero(), SpaceTimeField::constant(1.0), 0.0);
    let (w, b) = ensembles(0.5, 0.1, 10, 2, 1);
    assert!(integrate(&model, &w, &b, &[0.55]).is_err());
    assert!(integrate(&model, &w, &b, &[2.0]).is_err());
    assert!(integrate(&model, &w, &b, &[0.5, 0.2]).is_err());
    assert!(integrate(&model, &w, &b, &[0.3, 1.0]).is_ok());
}
