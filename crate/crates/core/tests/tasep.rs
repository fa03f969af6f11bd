mod common;

use ness_core::cycles::{cycle_counts, CycleCatalog};
use ness_core::decomposition::enumerate_decompositions;
use ness_core::tasep::{
    build_tasep, compose_permutations, detect_kink, log_spaced, particle_permutation,
    tasep_analytic, tasep_sweep, Gait, TasepConfig,
};

#[test]
fn analytic_matches_numeric_pipeline() {
    for x in log_spaced(0.01, 100.0, 50).unwrap() {
        let c = TasepConfig::new(x).unwrap();
        let p = build_tasep(c);
        let (pa, fa) = tasep_analytic(c);
        let pn = p.stationary_distribution().unwrap();
        let fnum = p.steady_fluxes().unwrap();
        for k in 0..6 {
            assert!(((pn[k] - pa[k]) / pa[k]).abs() <= 1e-12, "x={x} state {k}");
        }
        for (i, j, v) in fa.edges() {
            assert!(((fnum.get(i, j) - v) / v).abs() <= 1e-12, "x={x}");
        }
    }
}

#[test]
fn two_decompositions_everywhere() {
    for x in [0.05, 0.3, 0.99, 1.0, 1.01, 4.0, 40.0] {
        let p = build_tasep(TasepConfig::new(x).unwrap());
        let f = p.steady_fluxes().unwrap();
        let cat = CycleCatalog::enumerate(&p.graph()).unwrap();
        assert_eq!(cat.len(), 4);
        let all = enumerate_decompositions(&f, &cat, 24).unwrap();
        assert_eq!(all.len(), 2, "x={x}");
        for d in &all {
            assert!(d.reconstruct_fluxes().max_abs_diff(&f) <= 1e-12);
        }
    }
}

#[test]
fn cycle_counts_of_the_ring() {
    let g = build_tasep(TasepConfig::new(1.0).unwrap()).graph();
    let c = cycle_counts(&g).unwrap();
    assert_eq!((c.total, c.betti, c.fundamental), (4, 3, 3));
}

#[test]
fn sweep_follows_the_three_regions() {
    let xs = [0.25, 0.5, 1.0, 2.0, 3.0];
    let rows = tasep_sweep(&xs, Gait::Alpha).unwrap();
    let alpha: Vec<f64> = rows.iter().map(|r| r.scaled_weight(Gait::Alpha)).collect();
    for (a, e) in alpha.iter().zip([0.5, 1.0, 2.0, 3.0, 4.0]) {
        assert!((a - e).abs() <= 1e-12);
    }
    assert_eq!(rows[2].support_tag(), "alpha+beta");
    assert_eq!(rows[0].support_tag(), "alpha+beta+gamma");
    assert_eq!(rows[4].support_tag(), "alpha+beta+delta");
}

#[test]
fn kink_slopes_at_one() {
    let k = detect_kink(Gait::Alpha, 1.0, 1e-4).unwrap();
    assert!((k.value - 2.0).abs() <= 1e-12);
    assert!((k.left_slope - 2.0).abs() <= 1e-3);
    assert!((k.right_slope - 1.0).abs() <= 1e-3);
    assert!((k.discontinuity() - 1.0).abs() <= 1e-3);
}

#[test]
fn two_gaits_restore_the_labelling() {
    for a in Gait::ALL {
        let pa = particle_permutation(&a.cycle()).unwrap();
        assert_eq!(pa, [1, 0]);
        for b in Gait::ALL {
            let pb = particle_permutation(&b.cycle()).unwrap();
            assert_eq!(compose_permutations(pa, pb), [0, 1]);
        }
    }
}
