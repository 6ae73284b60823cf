use num_complex::Complex64;
use proptest::prelude::*;
use reslab::harness::{match_sets, run_cells, write_csv, Method};
use reslab::model::{CertifiedSetup, ProblemConfig};
use reslab::wkb::ShootingOptions;
use std::collections::BTreeSet;

fn points() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0..1.0f64, -0.1..0.0f64).prop_map(|(re, im)| Complex64::new(re, im)), 0..8)
}

proptest! {
    #[test]
    fn pairing_is_symmetric(a in points(), b in points(), cap in 0.01..0.5f64) {
        let ab = match_sets(&a, &b, cap);
        let ba = match_sets(&b, &a, cap).swapped();
        let set = |p: &reslab::harness::Pairing| p.pairs.iter().map(|q| (q.a, q.b)).collect::<BTreeSet<_>>();
        prop_assert_eq!(set(&ab), set(&ba));
        prop_assert_eq!(ab.unmatched_a, ba.unmatched_a);
    }

    #[test]
    fn pairing_is_injective_and_capped(a in points(), b in points(), cap in 0.01..0.5f64) {
        let m = match_sets(&a, &b, cap);
        let left: BTreeSet<_> = m.pairs.iter().map(|p| p.a).collect();
        let right: BTreeSet<_> = m.pairs.iter().map(|p| p.b).collect();
        prop_assert_eq!(left.len(), m.pairs.len());
        prop_assert_eq!(right.len(), m.pairs.len());
        prop_assert_eq!(m.pairs.len() + m.unmatched_a.len(), a.len());
        prop_assert_eq!(m.pairs.len() + m.unmatched_b.len(), b.len());
        prop_assert!(m.pairs.iter().all(|p| p.distance <= cap));
        // each selected pair was the closest among the candidates still free
        for (k, p) in m.pairs.iter().enumerate() {
            let taken_a: BTreeSet<_> = m.pairs[..k].iter().map(|q| q.a).collect();
            let taken_b: BTreeSet<_> = m.pairs[..k].iter().map(|q| q.b).collect();
            for (i, za) in a.iter().enumerate().filter(|(i, _)| !taken_a.contains(i)) {
                for (j, zb) in b.iter().enumerate().filter(|(j, _)| !taken_b.contains(j)) {
                    prop_assert!((za - zb).norm() >= p.distance, "pair ({i},{j}) closer than selection {k}");
                }
            }
        }
    }
}

fn sweep_csv() -> (Vec<u8>, reslab::harness::MatchReport) {
    let setup = CertifiedSetup::from_config(&ProblemConfig::tanh1()).unwrap();
    let report = run_cells(&setup, &[0.2, 0.1], 2.0, 0.6, &[Method::Shooting, Method::Pseudo], &ShootingOptions::default(), 0.5, 0.5).unwrap();
    let mut buf = Vec::new();
    write_csv(&report.rows(), &mut buf).unwrap();
    (buf, report)
}

#[test]
fn csv_is_deterministic_and_conserves_every_resonance() {
    let (first, report) = sweep_csv();
    let (second, _) = sweep_csv();
    assert_eq!(first, second);

    let text = String::from_utf8(first).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,h,n,re_E,im_E,residual,stability"));
    let body: Vec<&str> = lines.collect();
    let unique: BTreeSet<&str> = body.iter().copied().collect();
    assert_eq!(unique.len(), body.len());
    for hr in &report.per_h {
        let count = |m: &str| body.iter().filter(|l| l.starts_with(&format!("{m},{:.16e},", hr.h))).count();
        assert_eq!(count("pseudo"), hr.pseudo.as_ref().unwrap().len());
        assert_eq!(count("shooting"), hr.shooting.as_ref().unwrap().len());
        assert_eq!(count("spectral"), 0);
        assert!(hr.shooting_match.as_ref().unwrap().unmatched_other.is_empty());
    }
}
