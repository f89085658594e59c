//! Fourier analysis of the indicator of a family's vertex set on `F_2^n`.
//!
//! Coefficients are kept as integer numerators `S_m = Σ_{a∈A} (−1)^(m,a)`
//! over the fixed denominator `2^n` (or `2^(n−1)` on `1^⊥`), so every
//! identity is checked exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bounds::{int, pow2};
use crate::error::{Error, Result};
use crate::family::{op_count, SetFamily};
use crate::gf2::{dot_bits, SetVector};

/// Largest ground set for which the full spectrum is materialised.
pub const SPECTRUM_MAX_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcentrationMode {
    General,
    /// Characters of the subgroup `1^⊥`; needs odd `n` and an all-even family.
    EvenRestricted,
}

impl ConcentrationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConcentrationMode::General => "general",
            ConcentrationMode::EvenRestricted => "even_restricted",
        }
    }
}

/// `(−1)^(m,a)`.
pub fn character_value(m: &SetVector, a: &SetVector) -> Result<i8> {
    Ok(if m.inner_product(a)? == 0 { 1 } else { -1 })
}

/// `f̂(χ_m) = 2^(−n) Σ_{a∈A} (−1)^(m,a)`.
pub fn indicator_fourier_coefficient(family: &SetFamily, m: &SetVector) -> Result<BigRational> {
    if m.n() != family.n() {
        return Err(Error::DimensionMismatch {
            left: family.n(),
            right: m.n(),
        });
    }
    Ok(int(character_sum(family.bits(), m.bits())) * pow2(-(family.n() as i64)))
}

fn character_sum(bits: &[u64], m: u64) -> i64 {
    let odd: i64 = bits.iter().map(|&a| dot_bits(m, a) as i64).sum();
    bits.len() as i64 - 2 * odd
}

/// All numerators `S_m` for `m` in `0..2^n`, via the Walsh–Hadamard butterfly.
pub fn spectrum_numerators(family: &SetFamily) -> Result<Vec<i64>> {
    let n = family.n();
    if n > SPECTRUM_MAX_N {
        return Err(Error::InvalidParameters(format!(
            "full spectrum limited to n <= {SPECTRUM_MAX_N} (n={n})"
        )));
    }
    let mut f = vec![0i64; 1 << n];
    for &a in family.bits() {
        f[a as usize] = 1;
    }
    let mut h = 1;
    while h < f.len() {
        for block in f.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierDiagnostic {
    pub n: usize,
    pub mode: ConcentrationMode,
    pub v: u64,
    pub e: u64,
    pub v_odd: u64,
    /// `(m, S_m)` with `f̂(χ_m) = S_m / 2^coefficient_log_den`; empty above
    /// [`SPECTRUM_MAX_N`].
    pub coefficients: Vec<(SetVector, i64)>,
    pub coefficient_log_den: u32,
    pub plancherel_lhs: BigRational,
    /// `None` when the spectrum was not computed.
    pub plancherel_rhs: Option<BigRational>,
    /// `|v² − 4e − 2v_o|` (general) or `|v² − 4e|` (restricted).
    pub concentration_lhs: BigInt,
    pub concentration_lhs_squared: BigInt,
    /// `2^n v²` (general) or `2^(n−1) v²` (restricted).
    pub concentration_rhs_squared: BigInt,
    pub concentration_holds: bool,
}

impl FourierDiagnostic {
    pub fn plancherel_holds(&self) -> Option<bool> {
        self.plancherel_rhs.as_ref().map(|r| r == &self.plancherel_lhs)
    }
}

/// The two sides of the concentration inequality, without the spectrum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcentrationTerms {
    pub v: u64,
    pub e: u64,
    pub v_odd: u64,
    /// `|v² − 4e − 2v_o|` (general) or `|v² − 4e|` (restricted).
    pub lhs: BigInt,
    pub lhs_squared: BigInt,
    /// `2^n v²` (general) or `2^(n−1) v²` (restricted).
    pub rhs_squared: BigInt,
    pub holds: bool,
}

fn check_mode(family: &SetFamily, mode: ConcentrationMode) -> Result<u32> {
    let n = family.n();
    match mode {
        ConcentrationMode::General => Ok(n as u32),
        ConcentrationMode::EvenRestricted if n % 2 == 1 && family.all_even() => Ok(n as u32 - 1),
        ConcentrationMode::EvenRestricted => Err(Error::NotApplicable(
            "restricted mode needs odd n and an all-even family".into(),
        )),
    }
}

/// Squared-form check of `|v² − 4e − 2v_o| <= 2^(n/2) v` (or the restricted form).
pub fn concentration_inequality(family: &SetFamily, mode: ConcentrationMode) -> Result<ConcentrationTerms> {
    let log_den = check_mode(family, mode)?;
    let v = family.len() as u64;
    let e = op_count(family);
    let v_odd = family.odd_member_count() as u64;
    let v_big = BigInt::from(v);
    let mut lhs = &v_big * &v_big - BigInt::from(4) * BigInt::from(e);
    if mode == ConcentrationMode::General {
        lhs -= BigInt::from(2) * BigInt::from(v_odd);
    }
    let lhs = lhs.abs();
    let lhs_squared = &lhs * &lhs;
    let rhs_squared = (BigInt::from(1) << log_den) * &v_big * &v_big;
    Ok(ConcentrationTerms {
        v,
        e,
        v_odd,
        holds: lhs_squared <= rhs_squared,
        lhs,
        lhs_squared,
        rhs_squared,
    })
}

pub fn concentration_check(family: &SetFamily, mode: ConcentrationMode) -> Result<FourierDiagnostic> {
    let n = family.n();
    let log_den = check_mode(family, mode)?;
    let terms = concentration_inequality(family, mode)?;
    let (coefficients, plancherel_rhs) = if n <= SPECTRUM_MAX_N {
        let spectrum = spectrum_numerators(family)?;
        let keep = |m: usize| match mode {
            ConcentrationMode::General => true,
            ConcentrationMode::EvenRestricted => m.count_ones() % 2 == 0,
        };
        let coefficients: Vec<(SetVector, i64)> = spectrum
            .iter()
            .enumerate()
            .filter(|&(m, _)| keep(m))
            .map(|(m, &s)| (SetVector::new(m as u64, n).expect("m < 2^n"), s))
            .collect();
        let sum_sq: i128 = coefficients.iter().map(|&(_, s)| (s as i128) * (s as i128)).sum();
        let rhs = int(sum_sq) * pow2(-2 * log_den as i64);
        (coefficients, Some(rhs))
    } else {
        (Vec::new(), None)
    };
    Ok(FourierDiagnostic {
        n,
        mode,
        v: terms.v,
        e: terms.e,
        v_odd: terms.v_odd,
        coefficients,
        coefficient_log_den: log_den,
        plancherel_lhs: int(terms.v) * pow2(-(log_den as i64)),
        plancherel_rhs,
        concentration_holds: terms.holds,
        concentration_lhs: terms.lhs,
        concentration_lhs_squared: terms.lhs_squared,
        concentration_rhs_squared: terms.rhs_squared,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityFloor {
    /// `e / C(v, 2)`.
    pub density: BigRational,
    /// Bracket around `½(1 − 2^(n/2)/v)`; equal ends when `n` is even.
    pub floor_low: BigRational,
    pub floor_high: BigRational,
    /// `density >= ½(1 − 2^(n/2)/v)`, decided exactly.
    pub holds: bool,
}

pub fn density_floor(family: &SetFamily) -> Result<DensityFloor> {
    if !family.all_even() {
        return Err(Error::Parity("density floor needs an all-even family".into()));
    }
    let v = family.len() as u64;
    if v < 2 {
        return Err(Error::InvalidParameters(format!("need at least 2 members (v={v})")));
    }
    let n = family.n() as i64;
    let e = op_count(family);
    let density = BigRational::new(BigInt::from(2 * e), BigInt::from(v * (v - 1)));
    let (lo, hi) = crate::bounds::pow2_bracket(&BigRational::new(BigInt::from(n), BigInt::from(2)));
    let half = BigRational::new(1.into(), 2.into());
    let floor_low = &half * (int(1) - hi / int(v));
    let floor_high = &half * (int(1) - lo / int(v));
    // density >= ½(1 − c/v)  ⇔  c >= t := v(1 − 2·density), c = 2^(n/2)
    let t = int(v) * (int(1) - int(2) * &density);
    let holds = !t.is_positive() || &t * &t <= pow2(n);
    Ok(DensityFloor {
        density,
        floor_low,
        floor_high,
        holds,
    })
}

impl DensityFloor {
    pub fn is_zero_density(&self) -> bool {
        self.density.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::*;
    use crate::family::build_odd_pair_graph;

    fn sv(n: usize, e: &[usize]) -> SetVector {
        SetVector::from_elements(n, e).unwrap()
    }

    #[test]
    fn character_examples() {
        let a = sv(3, &[1, 2]);
        assert_eq!(character_value(&SetVector::empty(3).unwrap(), &a).unwrap(), 1);
        assert_eq!(character_value(&sv(3, &[1]), &a).unwrap(), -1);
        assert!(character_value(&sv(3, &[1]), &sv(4, &[1])).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let f = build_full_even_family(3).unwrap();
        let zero = SetVector::empty(3).unwrap();
        assert_eq!(indicator_fourier_coefficient(&f, &zero).unwrap(), BigRational::new(4.into(), 8.into()));
        assert_eq!(
            indicator_fourier_coefficient(&f, &sv(3, &[1, 2])).unwrap(),
            BigRational::zero()
        );
    }

    #[test]
    fn butterfly_matches_direct_sum_and_degree_formula() {
        let f = build_eventown_mixed(8, 5).unwrap();
        let spectrum = spectrum_numerators(&f).unwrap();
        for (m, &s) in spectrum.iter().enumerate() {
            assert_eq!(s, character_sum(f.bits(), m as u64));
        }
        let g = build_odd_pair_graph(&f);
        for (i, a) in f.members().iter().enumerate() {
            let expected = f.len() as i64 - 2 * g.degree(i) as i64 - 2 * a.parity() as i64;
            assert_eq!(spectrum[a.bits() as usize], expected);
        }
    }

    #[test]
    fn concentration_examples() {
        let f = build_eventown_blocks(4, BlockVariant::A).unwrap();
        let d = concentration_check(&f, ConcentrationMode::General).unwrap();
        assert_eq!(d.concentration_lhs, BigInt::from(16));
        assert_eq!(d.concentration_lhs_squared, d.concentration_rhs_squared);
        assert!(d.concentration_holds);
        assert_eq!(d.plancherel_holds(), Some(true));

        for n in [3, 5, 7] {
            let f = build_full_even_family(n).unwrap();
            let d = concentration_check(&f, ConcentrationMode::EvenRestricted).unwrap();
            assert_eq!(d.concentration_lhs, BigInt::from(d.v));
            assert_eq!(d.plancherel_holds(), Some(true));
            assert_eq!(d.coefficients.len(), 1 << (n - 1));
        }

        let empty = SetFamily::new(4, vec![]).unwrap();
        let d = concentration_check(&empty, ConcentrationMode::General).unwrap();
        assert!(d.concentration_lhs.is_zero() && d.concentration_holds);

        let f = build_full_even_family(4).unwrap();
        assert!(concentration_check(&f, ConcentrationMode::EvenRestricted).is_err());
    }

    #[test]
    fn density_examples() {
        let d = density_floor(&build_full_even_family(5).unwrap()).unwrap();
        assert_eq!(d.density, BigRational::new(1.into(), 2.into()));
        assert!(d.holds);
        let d = density_floor(&build_full_even_family(4).unwrap()).unwrap();
        assert_eq!(d.density, BigRational::new(3.into(), 7.into()));
        assert_eq!(d.floor_low, d.floor_high);
        assert!(d.holds);
        let d = density_floor(&build_eventown_blocks(8, BlockVariant::B).unwrap()).unwrap();
        assert!(d.is_zero_density());
        assert!(d.holds);
        assert!(d.floor_high <= BigRational::zero());
        assert!(density_floor(&build_as_family(1).unwrap()).is_err());
    }
}
