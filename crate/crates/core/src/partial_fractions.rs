use crate::error::{Error, Result};
use crate::poly;
use crate::tf::TransferFunction;

const REPEATED_SEPARATION: f64 = 1e-6;
const RECOMBINE_TOL: f64 = 1e-8;

/// First-order term `gain / (time_constant s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagTerm {
    pub gain: f64,
    pub time_constant: f64,
}

impl LagTerm {
    pub fn transfer(&self) -> TransferFunction {
        TransferFunction::first_order(self.gain, self.time_constant)
    }
}

/// Sum of first-order lags plus a direct feedthrough.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionTerms {
    /// Sorted by increasing time constant.
    pub terms: Vec<LagTerm>,
    pub direct: f64,
}

impl PartialFractionTerms {
    pub fn recombine(&self) -> TransferFunction {
        self.terms
            .iter()
            .fold(TransferFunction::gain(self.direct), |acc, t| &acc + &t.transfer())
    }
}

/// Expands a proper transfer function with simple, negative real poles into
/// `direct + sum gain_i / (tau_i s + 1)`.
pub fn partial_fractions(tf: &TransferFunction) -> Result<PartialFractionTerms> {
    if !tf.is_proper() {
        return Err(Error::ImproperTransfer {
            num: tf.num().len() - 1,
            den: tf.den().len() - 1,
        });
    }
    let (direct, rest) = if tf.num().len() == tf.den().len() {
        let (q, r) = poly::divide(tf.num(), tf.den())?;
        (q[0], r)
    } else {
        (0.0, tf.num().to_vec())
    };
    let den = tf.den();
    let poles = poly::roots(den);
    for p in &poles {
        if p.im.abs() > 1e-10 * p.norm() {
            return Err(Error::ComplexPoles);
        }
    }
    let reals: Vec<f64> = poles.iter().map(|p| p.re).collect();
    // a double root comes back from the eigenvalue solver split by ~sqrt(eps)
    for (i, a) in reals.iter().enumerate() {
        for b in &reals[i + 1..] {
            if (a - b).abs() < REPEATED_SEPARATION * (1.0 + a.abs()) {
                return Err(Error::RepeatedPoles);
            }
        }
    }
    let dden = poly::derivative(den);
    let mut terms = Vec::with_capacity(reals.len());
    for &p in &reals {
        if p == 0.0 {
            return Err(Error::IntegratorPresent);
        }
        if p > 0.0 {
            return Err(Error::UnstableSystem(p));
        }
        let residue = poly::eval(&rest, p) / poly::eval(&dden, p);
        // residue / (s - p) == (-residue / p) / ((-1 / p) s + 1)
        terms.push(LagTerm {
            gain: -residue / p,
            time_constant: -1.0 / p,
        });
    }
    terms.sort_by(|a, b| a.time_constant.total_cmp(&b.time_constant));
    let expansion = PartialFractionTerms { terms, direct };
    let err = expansion.recombine().coefficient_error(tf);
    if !(err < RECOMBINE_TOL) {
        return Err(Error::Numerical(format!(
            "partial fraction expansion is ill-conditioned (recombination error {err:e})"
        )));
    }
    Ok(expansion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_residues() {
        let tf = TransferFunction::new(vec![1.0], vec![1.0, 3.0, 2.0]).unwrap();
        let pf = partial_fractions(&tf).unwrap();
        assert_eq!(pf.terms.len(), 2);
        assert!((pf.terms[0].gain + 0.5).abs() < 1e-14);
        assert!((pf.terms[0].time_constant - 0.5).abs() < 1e-14);
        assert!((pf.terms[1].gain - 1.0).abs() < 1e-14);
        assert!((pf.terms[1].time_constant - 1.0).abs() < 1e-14);
        assert!(pf.recombine().coefficient_error(&tf) < 1e-12);
    }

    #[test]
    fn complex_poles_rejected() {
        let tf = TransferFunction::new(vec![1.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(partial_fractions(&tf), Err(Error::ComplexPoles));
    }

    #[test]
    fn repeated_poles_rejected() {
        let tf = TransferFunction::new(vec![1.0], vec![1.0, 2.0, 1.0]).unwrap();
        assert_eq!(partial_fractions(&tf), Err(Error::RepeatedPoles));
        // (s + 0.3)^2 (s + 1.7)
        let den = poly::mul(&[1.0, 0.6, 0.09], &[1.0, 1.7]);
        let tf = TransferFunction::new(vec![0.5, 0.0, 0.2], den).unwrap();
        assert!(partial_fractions(&tf).is_err());
    }

    #[test]
    fn direct_term() {
        // (s + 3) / (s + 1) = 1 + 2 / (s + 1)
        let tf = TransferFunction::new(vec![1.0, 3.0], vec![1.0, 1.0]).unwrap();
        let pf = partial_fractions(&tf).unwrap();
        assert!((pf.direct - 1.0).abs() < 1e-15);
        assert!((pf.terms[0].gain - 2.0).abs() < 1e-15);
        assert!(pf.recombine().coefficient_error(&tf) < 1e-14);
    }
}
