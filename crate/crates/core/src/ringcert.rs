//! Certificates for ring structure: presentation, powers and the
//! invariant factors of the reduced group.

use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::json;

use crate::cert::{big, big_rows, bigs, Backend, Certificate, Verdict};
use crate::error::{Error, Result};
use crate::lensring::{LensRing, RingElement};

fn ring_json(ring: &LensRing) -> serde_json::Value {
    json!({ "p": ring.p(), "k": ring.k(), "n": ring.n() })
}

/// Relation polynomial, HNF of the ideal lattice and its determinant.
pub fn info_certificate(ring: &LensRing) -> Certificate {
    let lat = ring.lattice();
    let witness = json!({
        "relation": bigs(&ring.relation().to_dense(ring.n())),
        "hnf": big_rows(lat.hnf.basis.rows()),
        "det": big(&lat.det),
        "order": big(&ring.params().order()),
    });
    Certificate::new("ring-info", Verdict::Verified, Backend::ExactHnf, ring_json(ring), witness)
}

/// `base^exponent` in normal form.
pub fn power_certificate(ring: &Arc<LensRing>, base: &RingElement, exponent: &BigInt) -> Result<Certificate> {
    if !Arc::ptr_eq(base.ring(), ring) {
        return Err(Error::RingMismatch(base.ring().params().to_string(), ring.params().to_string()));
    }
    let result = base.pow_big(exponent)?;
    let mut params = ring_json(ring);
    params["base"] = bigs(base.coeffs());
    params["exponent"] = big(exponent);
    let witness = json!({ "result": bigs(result.coeffs()) });
    Ok(Certificate::new("ring-power", Verdict::Verified, Backend::ExactHnf, params, witness))
}

/// Smith form `left * G * right = diag(factors)` of the generator matrix `G`.
pub fn factors_certificate(ring: &LensRing) -> Certificate {
    let snf = ring.smith();
    let factors = snf.invariant_factors();
    let nontrivial: Vec<BigInt> = factors.iter().filter(|d| **d != BigInt::from(1)).cloned().collect();
    let witness = json!({
        "factors": bigs(&factors),
        "nontrivial": bigs(&nontrivial),
        "left": big_rows(snf.left.rows()),
        "right": big_rows(snf.right.rows()),
    });
    Certificate::new("invariant-factors", Verdict::Verified, Backend::ExactHnf, ring_json(ring), witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::check_certificate;
    use crate::lensring::{make_ring, Generator};

    #[test]
    fn ring_certificates_check() {
        for (p, k, n) in [(2, 2, 3), (3, 1, 4), (5, 2, 5), (2, 1, 1)] {
            let ring = make_ring(p, k, n).unwrap();
            check_certificate(&info_certificate(&ring)).unwrap();
            check_certificate(&factors_certificate(&ring)).unwrap();
            let eta = ring.generator(Generator::Eta);
            let c = power_certificate(&ring, &eta, &BigInt::from(12345)).unwrap();
            check_certificate(&c).unwrap();
        }
    }

    #[test]
    fn tampered_power_fails() {
        let ring = make_ring(3, 2, 4).unwrap();
        let sigma = ring.generator(Generator::Sigma);
        let mut c = power_certificate(&ring, &sigma, &BigInt::from(2)).unwrap();
        c.witness["result"][2] = json!("2");
        assert!(check_certificate(&c).is_err());
    }
}
