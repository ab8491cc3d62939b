use bellmart::martingale::{
    frobenius_sq, simulate, simulate_checked, transform_az, Construction, Hypotheses,
    MartingaleSpec, DEFAULT_BATTERY,
};
use proptest::prelude::*;

fn spec(construction: Construction, steps: usize, dt: f64, paths: usize) -> MartingaleSpec {
    MartingaleSpec {
        steps,
        dt,
        construction,
        seed: 7,
        paths,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn az_transform_relations(m in prop::array::uniform4(-1e3..1e3f64)) {
        let (x, y) = ([m[0], m[1]], [m[2], m[3]]);
        let (u, v) = transform_az(x, y);
        prop_assert_eq!(u[0] * v[0] + u[1] * v[1], 0.0);
        let zz = frobenius_sq(&[x, y]);
        let nu = u[0] * u[0] + u[1] * u[1];
        let nv = v[0] * v[0] + v[1] * v[1];
        prop_assert_eq!(nu, nv);
        prop_assert!(nu + nv <= 4.0 * zz * (1.0 + 1e-15));
        prop_assert!(nu <= 2.0 * zz * (1.0 + 1e-15));
    }
}

#[test]
fn battery_is_a_martingale() {
    for name in DEFAULT_BATTERY {
        let c: Construction = name.parse().unwrap();
        let ens = simulate(&spec(c, 200, 1e-3, 4000)).unwrap();
        let n = ens.paths.len() as f64;
        for coord in 0..4 {
            let xs: Vec<f64> = ens
                .paths
                .iter()
                .map(|p| {
                    if coord < 2 {
                        p.z[coord]
                    } else {
                        p.w[coord - 2]
                    }
                })
                .collect();
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt();
            assert!(
                mean.abs() <= 4.0 * se,
                "{name} coord {coord}: mean {mean}, se {se}"
            );
        }
    }
}

#[test]
fn battery_satisfies_hypotheses() {
    for name in DEFAULT_BATTERY {
        let c: Construction = name.parse().unwrap();
        simulate_checked(&spec(c, 300, 1e-3, 500), Hypotheses::ALL).unwrap();
    }
}

#[test]
fn identity_bracket_is_deterministic() {
    let dt = 1.0 / 1024.0;
    let ens = simulate(&spec(Construction::Identity, 1024, dt, 16)).unwrap();
    for p in &ens.paths {
        assert_eq!(p.zz, 2.0);
        assert_eq!(p.uu + p.vv, 2.0);
    }
    let ens = simulate(&spec(Construction::Identity, 1000, 1e-3, 4)).unwrap();
    for p in &ens.paths {
        assert!((p.zz - 2.0).abs() <= 1000.0 * f64::EPSILON * 2.0);
    }
}

#[test]
fn violated_subordination_names_path_and_step() {
    let c = Construction::Split {
        z: Box::new(Construction::Identity),
        w: Box::new(Construction::constant_rotation(0.5, 1.0)),
    };
    let err = simulate_checked(&spec(c, 10, 1e-2, 3), Hypotheses::ALL).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("path 0") && msg.contains("step 0"), "{msg}");
}

#[test]
fn same_seed_same_ensemble() {
    let c: Construction = "rotation".parse().unwrap();
    let a = simulate(&spec(c.clone(), 100, 1e-2, 300)).unwrap();
    let b = simulate(&spec(c.clone(), 100, 1e-2, 300)).unwrap();
    assert_eq!(a, b);
    let mut other = spec(c, 100, 1e-2, 300);
    other.seed = 8;
    assert_ne!(simulate(&other).unwrap().paths, a.paths);
}
