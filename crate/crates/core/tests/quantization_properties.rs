use reslab::action::action_data;
use reslab::model::{CertifiedSetup, ProblemConfig};
use reslab::quantization::{c0, pseudo_resonances, EnergyRectangle};

const T0: f64 = 3.2967330891440646;

fn tanh1() -> CertifiedSetup {
    CertifiedSetup::from_config(&ProblemConfig::tanh1()).unwrap()
}

#[test]
fn roots_are_simple_ordered_and_in_the_lower_half_plane() {
    let s = tanh1();
    for h in [0.1, 0.05, 0.02] {
        let rect = EnergyRectangle::new(0.5, 2.0, 2.0 / T0, h).unwrap();
        let roots = pseudo_resonances(&s, &rect).unwrap();
        assert!(!roots.is_empty(), "no roots at h = {h}");
        for w in roots.windows(2) {
            assert!(w[1].e.re > w[0].e.re);
            assert!((w[1].e - w[0].e).norm() >= 0.1 * h);
        }
        for p in &roots {
            assert!(p.e.im < 0.0);
            // |C0'| from a difference quotient of C0 itself
            let d = 1e-7;
            let slope = (c0(&s, p.e + d, h).unwrap() - c0(&s, p.e - d, h).unwrap()).norm() / (2.0 * d);
            assert!(slope >= 0.5 * T0 / h, "|C0'| = {slope} at {}", p.e);
            let t = action_data(&s, p.e).unwrap().s_prime;
            assert!((slope - t.norm() / h).abs() < 1e-3 * slope);
        }
    }
}

#[test]
fn shallow_rectangle_still_holds_roots() {
    let s = tanh1();
    let m = 1.05 / T0;
    let rect = EnergyRectangle::new(0.5, 2.0, m, 0.05).unwrap();
    let roots = pseudo_resonances(&s, &rect).unwrap();
    assert!(!roots.is_empty());
    assert!(roots.iter().all(|p| rect.contains(p.e)));
}
