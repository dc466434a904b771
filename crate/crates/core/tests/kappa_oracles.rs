use mmv_core::analysis::{
    kappa_cstogradmp, kappa_cstoiht, kappa_mstogradmp, kappa_mstoiht, ConvexityConstants, Sampling,
};
use proptest::prelude::*;

type C = ConvexityConstants<f64>;

/// Constants with `0 < ρ⁻ ≤ ρ̄⁺ ≤ ρ⁺` and `α ∈ (0, 2ρ⁻)`.
fn constants() -> impl Strategy<Value = C> {
    (0.01f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.01f64..0.99).prop_map(|(rm, a, b, s)| {
        let rho_plus = rm * (1.0 + 3.0 * a);
        let rho_plus_bar = rm + b * (rho_plus - rm);
        C::new(rm, rho_plus, rho_plus_bar, 2.0 * rm * s).unwrap()
    })
}

fn mstoiht_direct(c: &C, g: f64, eta: f64) -> f64 {
    2.0 * (1.0 - 2.0 * g * c.rho_minus + g * g * c.alpha * c.rho_minus).sqrt()
        + ((eta * eta - 1.0) * (1.0 + g * g * c.alpha * c.rho_plus_bar - 2.0 * g * c.rho_minus)).sqrt()
}

fn cstoiht_direct(c: &C, g: f64, eta: f64) -> f64 {
    8.0 * (1.0 - 2.0 * g * c.rho_minus + g * g * c.alpha * c.rho_minus)
        + 4.0 * (eta * eta - 1.0) * (1.0 + g * g * c.alpha * c.rho_plus_bar - 2.0 * g * c.rho_minus)
}

fn mstogradmp_direct(c: &C, e1: f64, e2: f64, max_mp: f64) -> f64 {
    let inner = (max_mp * (c.rho_plus * (2.0 * e1 * e1 - 1.0) / (c.rho_minus * e2 * e2) - 1.0)).sqrt()
        + (e1 * e1 - 1.0).sqrt() / e1;
    (1.0 + e2) * (c.alpha / c.rho_minus).sqrt() * inner
}

fn cstogradmp_direct(c: &C, e1: f64, e2: f64, max_mp: f64) -> f64 {
    let beta1 = c.alpha / (2.0 * c.rho_minus - c.alpha);
    let beta2 = 4.0 * max_mp * ((2.0 * e1 * e1 - 1.0) * c.rho_plus - e1 * e1 * c.rho_minus) / (e1 * e1 * c.rho_minus)
        + 2.0 * (e1 * e1 - 1.0) / (e1 * e1);
    (2.0 + 2.0 * e2 * e2) * beta1 * beta2
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn mstoiht_agrees_with_direct_formula(c in constants(), g in 0.01f64..1.0, eta in 1.0f64..2.0) {
        let direct = mstoiht_direct(&c, g, eta);
        match kappa_mstoiht(&c, g, eta) {
            Ok(k) => prop_assert!(close(k, direct), "{k} vs {direct}"),
            Err(e) => prop_assert!(direct.is_nan() && e.is_numeric()),
        }
    }

    #[test]
    fn cstoiht_agrees_with_direct_formula(c in constants(), d in constants(), g in 0.01f64..1.0, eta in 1.0f64..2.0) {
        let worst = cstoiht_direct(&c, g, eta).max(cstoiht_direct(&d, g, eta));
        match kappa_cstoiht(&[c, d], g, eta) {
            Ok(out) => {
                prop_assert!(close(out.per_column[0], cstoiht_direct(&c, g, eta)));
                prop_assert!(close(out.per_column[1], cstoiht_direct(&d, g, eta)));
                prop_assert!(close(out.kappa_hat, worst.sqrt()));
            }
            Err(e) => prop_assert!(worst < 0.0 && e.is_numeric()),
        }
    }

    #[test]
    fn gradmp_families_agree_with_direct_formulas(
        c in constants(),
        e1 in 1.0f64..2.0,
        e2 in 1.0f64..2.0,
        comps in 1usize..200,
        skew in 1.0f64..3.0,
    ) {
        let s = Sampling { components: comps, p_min: 1.0 / (comps as f64 * skew), p_max: (skew / comps as f64).min(1.0) };
        let max_mp = comps as f64 * s.p_max;
        let direct = mstogradmp_direct(&c, e1, e2, max_mp);
        match kappa_mstogradmp(&c, e1, e2, &s) {
            Ok(k) => prop_assert!(close(k.kappa, direct), "{} vs {direct}", k.kappa),
            Err(e) => prop_assert!(direct.is_nan() && e.is_numeric()),
        }
        let k = kappa_cstogradmp(&c, e1, e2, &s).unwrap();
        prop_assert!(close(k.kappa_j, cstogradmp_direct(&c, e1, e2, max_mp)));
        prop_assert!(close(k.kappa_tilde, k.kappa_j.sqrt()));
    }

    #[test]
    fn exact_thresholding_identities(c in constants(), g in 0.01f64..1.0, comps in 1usize..50) {
        // With η = 1 the concatenated IHT coefficient is √2 times the joint one.
        if let Ok(k) = kappa_mstoiht(&c, g, 1.0) {
            let hat = kappa_cstoiht(&[c], g, 1.0).unwrap().kappa_hat;
            prop_assert!(close(hat, 2f64.sqrt() * k));
        }
        // With η₁ = η₂ = 1 and α = ρ⁻ the concatenated GradMP coefficient is twice the joint one.
        let tied = C::new(c.rho_minus, c.rho_plus, c.rho_plus_bar, c.rho_minus).unwrap();
        let s = Sampling::uniform(comps);
        let joint = kappa_mstogradmp(&tied, 1.0, 1.0, &s).unwrap().kappa;
        let concat = kappa_cstogradmp(&tied, 1.0, 1.0, &s).unwrap().kappa_tilde;
        prop_assert!(close(concat, 2.0 * joint));
    }

    #[test]
    fn coefficients_grow_with_alpha(c in constants(), g in 0.01f64..1.0, t in 0.0f64..1.0) {
        let larger = C::new(c.rho_minus, c.rho_plus, c.rho_plus_bar, c.alpha + t * (2.0 * c.rho_minus - c.alpha)).unwrap();
        let s = Sampling::uniform(10);
        if let (Ok(a), Ok(b)) = (kappa_mstoiht(&c, g, 1.2), kappa_mstoiht(&larger, g, 1.2)) {
            prop_assert!(b >= a);
        }
        prop_assert!(kappa_mstogradmp(&larger, 1.1, 1.1, &s).unwrap().kappa >= kappa_mstogradmp(&c, 1.1, 1.1, &s).unwrap().kappa);
        if let Ok(b) = kappa_cstogradmp(&larger, 1.1, 1.1, &s) {
            prop_assert!(b.kappa_tilde >= kappa_cstogradmp(&c, 1.1, 1.1, &s).unwrap().kappa_tilde);
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    let c = C::new(0.3, 0.5, 0.5, 0.5).unwrap();
    let s = Sampling::uniform(4);
    assert!(!kappa_mstoiht(&c, -1.0, 1.0).unwrap_err().is_numeric());
    assert!(!kappa_mstoiht(&c, 1.0, 0.9).unwrap_err().is_numeric());
    assert!(!kappa_mstogradmp(&c, 0.5, 1.0, &s).unwrap_err().is_numeric());
    let bad = Sampling {
        components: 4,
        p_min: 0.5,
        p_max: 0.25,
    };
    assert!(kappa_cstogradmp(&c, 1.0, 1.0, &bad).is_err());
    // 2ρ⁻ < α puts β₁ past its pole.
    let c = C::new(0.3, 0.5, 0.5, 0.7).unwrap();
    assert!(kappa_cstogradmp(&c, 1.0, 1.0, &s).unwrap_err().is_numeric());
}
