//! Bessel functions of the first kind for the half-integer orders that the
//! d-dimensional Hankel transform needs (`d/2 - 1` for `d = 2..8`).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Switch-over point between the power series and the asymptotic expansion.
const SERIES_LIMIT: f64 = 12.0;

/// A Bessel order `nu = twice / 2` with `nu` in `{0, 0.5, ..., 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub const MAX_TWICE: u32 = 6;

    pub fn new(order: f64) -> Result<Self> {
        let twice = 2.0 * order;
        if !(order >= 0.0) || twice.fract() != 0.0 || twice > Self::MAX_TWICE as f64 {
            return Err(Error::invalid(format!(
                "unsupported Bessel order {order}; expected one of 0, 0.5, ..., 3"
            )));
        }
        Ok(Self {
            twice: twice as u32,
        })
    }

    /// Order `d/2 - 1` used by the radial Fourier transform in `d` dimensions.
    pub fn for_dimension(d: usize) -> Result<Self> {
        if !(2..=8).contains(&d) {
            return Err(Error::invalid(format!("dimension {d} outside 2..=8")));
        }
        Ok(Self {
            twice: d as u32 - 2,
        })
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

/// `Gamma(twice / 2)` for positive integer `twice`.
pub fn gamma_half_integer(twice: u32) -> f64 {
    assert!(twice > 0, "Gamma has a pole at 0");
    if twice % 2 == 0 {
        (1..twice / 2).fold(1.0, |acc, j| acc * j as f64)
    } else {
        // Gamma(n + 1/2) = sqrt(pi) * (2n-1)!! / 2^n
        let n = (twice - 1) / 2;
        (0..n).fold(PI.sqrt(), |acc, j| acc * (j as f64 + 0.5))
    }
}

/// `J_order(x)` for `x >= 0`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    let order = BesselOrder::new(order)?;
    if !(x >= 0.0) {
        return Err(Error::invalid(format!(
            "Bessel argument must be non-negative, got {x}"
        )));
    }
    Ok(bessel_j_unchecked(order, x))
}

#[inline]
pub(crate) fn bessel_j_unchecked(order: BesselOrder, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        series(order, x)
    } else {
        asymptotic(order, x)
    }
}

fn series(order: BesselOrder, x: f64) -> f64 {
    let nu = order.value();
    let half = 0.5 * x;
    let lead = if order.twice == 0 {
        1.0
    } else if x == 0.0 {
        return 0.0;
    } else {
        half.powf(nu) / gamma_half_integer(order.twice + 2)
    };
    let q = half * half;
    let inv = &SERIES_DENOMINATORS[order.twice as usize];
    // at x = 12 the terms fall below 1e-17 of the leading term by m = 40
    let terms = ((2.0 * x + 8.0) as usize).min(SERIES_TERMS);
    let mut term = 1.0;
    let mut sum = 1.0;
    for c in &inv[..terms] {
        term *= -q * c;
        sum += term;
    }
    lead * sum
}

const SERIES_TERMS: usize = 40;

/// `1 / (m (m + nu))` for `m = 1..=SERIES_TERMS`, per doubled order.
static SERIES_DENOMINATORS: [[f64; SERIES_TERMS]; BesselOrder::MAX_TWICE as usize + 1] = {
    let mut table = [[0.0; SERIES_TERMS]; BesselOrder::MAX_TWICE as usize + 1];
    let mut twice = 0;
    while twice <= BesselOrder::MAX_TWICE as usize {
        let nu = twice as f64 / 2.0;
        let mut m = 1;
        while m <= SERIES_TERMS {
            table[twice][m - 1] = 1.0 / (m as f64 * (m as f64 + nu));
            m += 1;
        }
        twice += 1;
    }
    table
};

fn asymptotic(order: BesselOrder, x: f64) -> f64 {
    let nu = order.value();
    let mu = 4.0 * nu * nu;
    let chi = x - (0.5 * nu + 0.25) * PI;
    // a_k / x^k with a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term == 0.0 {
            break;
        }
        if term.abs() > prev {
            // asymptotic series has started to diverge
            break;
        }
        prev = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an arbitrary-precision library (30 digits).
    const REFERENCE: &[(f64, f64, f64)] = &[
        (0.0, 0.3, 0.9776262465382961),
        (0.0, 2.404826, -2.2962111144365325e-07),
        (0.0, 5.0, -0.1775967713143383),
        (0.0, 11.9, 0.025049441699589645),
        (0.0, 12.1, 0.06966677360680731),
        (0.0, 30.0, -0.08636798358104021),
        (0.0, 250.0, -0.026053373425204234),
        (0.0, 999.0, 0.01736929635519413),
        (0.5, 0.3, 0.4304935173281246),
        (0.5, 11.9, -0.14297213406708068),
        (0.5, 12.1, -0.10313819465555996),
        (0.5, 999.0, -0.0006679739283829117),
        (1.0, 0.3, 0.148318816273104),
        (1.0, 2.404826, 0.5191474018059454),
        (1.0, 5.0, -0.32757913759146523),
        (1.0, 11.9, -0.22898324966192404),
        (1.0, 12.1, -0.2157489733769248),
        (1.0, 30.0, -0.11875106261662294),
        (1.0, 999.0, -0.01830972847491162),
        (1.5, 0.3, 0.04330988191837832),
        (1.5, 12.1, -0.21340358035979595),
        (1.5, 250.0, -0.012356810274606198),
        (2.0, 0.3, 0.011165861949063964),
        (2.0, 5.0, 0.046565116277752214),
        (2.0, 11.9, -0.06353402147470293),
        (2.0, 12.1, -0.10532776094183621),
        (2.0, 30.0, 0.07845124607326535),
        (2.5, 0.3, 0.0026053018556586676),
        (2.5, 5.0, 0.24037720111131736),
        (2.5, 12.1, 0.05022821605395765),
        (2.5, 999.0, 0.0005921908055569259),
        (3.0, 0.3, 0.000559343047748846),
        (3.0, 2.404826, 0.19899998652232023),
        (3.0, 5.0, 0.364831230613667),
        (3.0, 11.9, 0.2076272760569819),
        (3.0, 12.1, 0.18092987885069797),
        (3.0, 30.0, 0.129211228759725),
        (3.0, 250.0, 0.043680353948217496),
        (3.0, 999.0, 0.01824003497153522),
    ];

    #[test]
    fn matches_reference_table() {
        for &(nu, x, want) in REFERENCE {
            let got = bessel_j(nu, x).unwrap();
            assert!(
                (got - want).abs() < 1e-10,
                "J_{nu}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(bessel_j(0.0, 2.404826).unwrap().abs() < 1e-5);
    }

    #[test]
    fn half_integer_closed_forms() {
        // spherical Bessel identities, independent of both evaluation branches
        for i in 1..400 {
            let x = 0.05 * i as f64 + 0.01 * (i % 7) as f64;
            let s = (2.0 / (PI * x)).sqrt();
            let j05 = s * x.sin();
            let j15 = s * (x.sin() / x - x.cos());
            let j25 = s * ((3.0 / (x * x) - 1.0) * x.sin() - 3.0 * x.cos() / x);
            assert!((bessel_j(0.5, x).unwrap() - j05).abs() < 1e-10, "x = {x}");
            assert!((bessel_j(1.5, x).unwrap() - j15).abs() < 1e-10, "x = {x}");
            if x > 0.5 {
                assert!((bessel_j(2.5, x).unwrap() - j25).abs() < 1e-10, "x = {x}");
            }
        }
    }

    #[test]
    fn recurrence_holds_across_branches() {
        // J_{nu-1}(x) + J_{nu+1}(x) = (2 nu / x) J_nu(x)
        for &x in &[0.7, 3.3, 9.0, 11.99, 12.01, 17.5, 64.0, 700.0] {
            for twice in 2..=4u32 {
                let nu = twice as f64 / 2.0;
                let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
                let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "nu = {nu}, x = {x}");
            }
        }
    }

    #[test]
    fn rejects_bad_orders_and_arguments() {
        assert!(matches!(
            bessel_j(0.25, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(bessel_j(3.5, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(
            bessel_j(-1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(bessel_j(1.0, -0.5).is_err());
        assert!(BesselOrder::for_dimension(9).is_err());
        assert_eq!(BesselOrder::for_dimension(5).unwrap().value(), 1.5);
    }

    #[test]
    fn gamma_at_half_integers() {
        assert!((gamma_half_integer(2) - 1.0).abs() < 1e-15);
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(5) - 1.329340388179137).abs() < 1e-14);
        assert!((gamma_half_integer(10) - 24.0).abs() < 1e-12);
    }
}
