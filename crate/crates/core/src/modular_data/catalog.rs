use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use super::{ModularData, ModularDataError};
use crate::exact_algebra::{ExactScalar, ScalarMatrix};

/// Built-in modular data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogId {
    /// `SU(2)` at level `k`, `1 ≤ k ≤ 28`.
    Su2(u32),
    Ising,
    Fibonacci,
    /// `Vec(Z/n)` with the quadratic form `θ_a = exp(2πi q a² / 2n)`.
    PointedCyclic(u32, u32),
    /// Drinfeld center of `Vec(Z/n)`.
    DoubleCyclic(u32),
    Trivial,
}

pub const SU2_MAX_LEVEL: u32 = 28;

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogId::Su2(k) => write!(f, "su2_{k}"),
            CatalogId::Ising => write!(f, "ising"),
            CatalogId::Fibonacci => write!(f, "fibonacci"),
            CatalogId::PointedCyclic(n, q) => write!(f, "pointed_cyclic_{n}_{q}"),
            CatalogId::DoubleCyclic(n) => write!(f, "double_cyclic_{n}"),
            CatalogId::Trivial => write!(f, "trivial"),
        }
    }
}

impl FromStr for CatalogId {
    type Err = ModularDataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ModularDataError::UnknownCatalog(s.to_string());
        let lower = s.trim().to_ascii_lowercase();
        let nums = |rest: &str| -> Result<Vec<u32>, ModularDataError> {
            rest.split(['_', ',', '(', ')', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| unknown()))
                .collect()
        };
        match lower.as_str() {
            "ising" => return Ok(CatalogId::Ising),
            "fibonacci" | "fib" => return Ok(CatalogId::Fibonacci),
            "trivial" => return Ok(CatalogId::Trivial),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("pointed_cyclic") {
            return match nums(rest)?.as_slice() {
                [n, q] => Ok(CatalogId::PointedCyclic(*n, *q)),
                _ => Err(unknown()),
            };
        }
        if let Some(rest) = lower.strip_prefix("double_cyclic") {
            return match nums(rest)?.as_slice() {
                [n] => Ok(CatalogId::DoubleCyclic(*n)),
                _ => Err(unknown()),
            };
        }
        if let Some(rest) = lower.strip_prefix("su2") {
            return match nums(rest)?.as_slice() {
                [k] => Ok(CatalogId::Su2(*k)),
                _ => Err(unknown()),
            };
        }
        Err(unknown())
    }
}

impl CatalogId {
    /// A representative list for listings; pointed and double families are
    /// shown at small parameters.
    pub fn listing() -> Vec<CatalogId> {
        let mut out: Vec<CatalogId> = (1..=SU2_MAX_LEVEL).map(CatalogId::Su2).collect();
        out.extend([
            CatalogId::Ising,
            CatalogId::Fibonacci,
            CatalogId::Trivial,
            CatalogId::PointedCyclic(2, 1),
            CatalogId::PointedCyclic(3, 2),
            CatalogId::PointedCyclic(4, 1),
            CatalogId::PointedCyclic(5, 2),
            CatalogId::DoubleCyclic(2),
            CatalogId::DoubleCyclic(3),
        ]);
        out
    }
}

pub fn catalog(id: &CatalogId) -> Result<ModularData, ModularDataError> {
    match *id {
        CatalogId::Su2(k) => su2(k),
        CatalogId::Ising => Ok(ising()),
        CatalogId::Fibonacci => Ok(fibonacci()),
        CatalogId::PointedCyclic(n, q) => pointed_cyclic(n, q),
        CatalogId::DoubleCyclic(n) => double_cyclic(n),
        CatalogId::Trivial => pointed_cyclic(1, 0).map(|md| rename(md, "trivial")),
    }
}

fn rename(md: ModularData, name: &str) -> ModularData {
    ModularData::new(
        name,
        md.conductor(),
        md.labels().to_vec(),
        md.unit(),
        md.s_tilde().clone(),
        md.t_exponents().to_vec(),
    )
    .expect("renaming preserves shape")
}

fn build(
    name: String,
    conductor: u32,
    labels: Vec<String>,
    s: ScalarMatrix,
    t: Vec<i64>,
) -> ModularData {
    ModularData::new(name, conductor, labels, 0, s, t).expect("catalog data is well formed")
}

/// `s̃_{ab} = [ (a+1)(b+1) ]_q` with `q = ζ_{2h}`, written as the
/// palindromic sum `Σ_{m<n} q^{n-1-2m}` in `Q(ζ_{4h})`.
fn su2(k: u32) -> Result<ModularData, ModularDataError> {
    if !(1..=SU2_MAX_LEVEL).contains(&k) {
        return Err(ModularDataError::InvalidParameter(format!(
            "su2 level must lie in 1..={SU2_MAX_LEVEL}, got {k}"
        )));
    }
    let h = (k + 2) as i64;
    let conductor = (4 * h) as u32;
    let r = (k + 1) as usize;
    let qnum = |n: i64| -> ExactScalar {
        let mut acc = ExactScalar::zero(conductor);
        for m in 0..n {
            acc = &acc + &ExactScalar::zeta(conductor, 2 * (n - 1 - 2 * m));
        }
        acc
    };
    let s = (0..r)
        .map(|a| (0..r).map(|b| qnum(((a + 1) * (b + 1)) as i64)).collect())
        .collect();
    let t = (0..r as i64).map(|a| a * (a + 2)).collect();
    let labels = (0..r).map(|a| a.to_string()).collect();
    Ok(build(format!("su2_{k}"), conductor, labels, s, t))
}

fn ising() -> ModularData {
    let n = 16;
    let sqrt2 = &ExactScalar::zeta(n, 2) + &ExactScalar::zeta(n, -2);
    let one = ExactScalar::one(n);
    let zero = ExactScalar::zero(n);
    let s = vec![
        vec![one.clone(), sqrt2.clone(), one.clone()],
        vec![sqrt2.clone(), zero, -&sqrt2],
        vec![one.clone(), -&sqrt2, one],
    ];
    let labels = ["1", "sigma", "psi"].iter().map(|s| s.to_string()).collect();
    build("ising".into(), n, labels, s, vec![0, 1, 8])
}

fn fibonacci() -> ModularData {
    let n = 5;
    // golden ratio 1 + ζ + ζ⁻¹
    let phi = &(&ExactScalar::one(n) + &ExactScalar::zeta(n, 1)) + &ExactScalar::zeta(n, 4);
    let s = vec![
        vec![ExactScalar::one(n), phi.clone()],
        vec![phi, ExactScalar::from_int(-1, n)],
    ];
    let labels = ["1", "tau"].iter().map(|s| s.to_string()).collect();
    build("fibonacci".into(), n, labels, s, vec![0, 2])
}

/// `θ_a = ζ_{2n}^{q a²}`, `s̃_{ab} = θ_a⁻¹ θ_b⁻¹ θ_{a+b} = ζ_{2n}^{-2qab}`
/// (sign convention matching `(s̃τ)³ = p⁺ s̃²`). Needs `q n` even for the
/// twist to be well defined on `Z/n` and `gcd(q, n) = 1` for nondegeneracy.
fn pointed_cyclic(n: u32, q: u32) -> Result<ModularData, ModularDataError> {
    if n == 0 {
        return Err(ModularDataError::InvalidParameter("n must be positive".into()));
    }
    if (q as u64 * n as u64) % 2 == 1 {
        return Err(ModularDataError::InvalidParameter(format!(
            "q n must be even for a quadratic form on Z/{n}, got q = {q}"
        )));
    }
    if n > 1 && q.gcd(&n) != 1 {
        return Err(ModularDataError::DegenerateData(format!(
            "gcd(q, n) = {} makes the pairing degenerate",
            q.gcd(&n)
        )));
    }
    let (conductor, tq, sq) = if n.is_multiple_of(2) {
        (2 * n, q as i64, 2 * q as i64)
    } else {
        (n, (q / 2) as i64, q as i64)
    };
    let r = n as usize;
    let s = (0..r as i64)
        .map(|a| {
            (0..r as i64)
                .map(|b| ExactScalar::zeta(conductor, -sq * a * b))
                .collect()
        })
        .collect();
    let t = (0..r as i64).map(|a| tq * a * a).collect();
    let labels = (0..r).map(|a| a.to_string()).collect();
    Ok(build(format!("pointed_cyclic_{n}_{q}"), conductor, labels, s, t))
}

/// Simples `(a, b)` in row-major order `a n + b`; `θ = ζ_n^{ab}`.
fn double_cyclic(n: u32) -> Result<ModularData, ModularDataError> {
    if n == 0 {
        return Err(ModularDataError::InvalidParameter("n must be positive".into()));
    }
    let n64 = n as i64;
    let pairs: Vec<(i64, i64)> = (0..n64).flat_map(|a| (0..n64).map(move |b| (a, b))).collect();
    let s = pairs
        .iter()
        .map(|(a, b)| {
            pairs
                .iter()
                .map(|(c, d)| ExactScalar::zeta(n, -(a * d + b * c)))
                .collect()
        })
        .collect();
    let t = pairs.iter().map(|(a, b)| a * b).collect();
    let labels = pairs.iter().map(|(a, b)| format!("({a},{b})")).collect();
    Ok(build(format!("double_cyclic_{n}"), n, labels, s, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in CatalogId::listing() {
            assert_eq!(id.to_string().parse::<CatalogId>().unwrap(), id);
        }
        assert_eq!("su2(10)".parse::<CatalogId>().unwrap(), CatalogId::Su2(10));
        assert!("su3_2".parse::<CatalogId>().is_err());
    }

    #[test]
    fn su2_level_two_dims() {
        let md = catalog(&CatalogId::Su2(2)).unwrap();
        let d: Vec<f64> = md.dims_unchecked().iter().map(|x| x.to_f64()).collect();
        assert_eq!(md.rank(), 3);
        assert!((d[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!((d[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn su2_matches_sine_ratio() {
        // independent float oracle: sin(π(a+1)(b+1)/h) / sin(π/h)
        for k in [3u32, 7, 12] {
            let md = catalog(&CatalogId::Su2(k)).unwrap();
            let h = (k + 2) as f64;
            for a in 0..=k as usize {
                for b in 0..=k as usize {
                    let x = std::f64::consts::PI * ((a + 1) * (b + 1)) as f64 / h;
                    let expect = x.sin() / (std::f64::consts::PI / h).sin();
                    assert!((md.s(a, b).to_f64() - expect).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            catalog(&CatalogId::Su2(29)),
            Err(ModularDataError::InvalidParameter(_))
        ));
        assert!(matches!(
            catalog(&CatalogId::PointedCyclic(3, 1)),
            Err(ModularDataError::InvalidParameter(_))
        ));
        assert!(matches!(
            catalog(&CatalogId::PointedCyclic(4, 2)),
            Err(ModularDataError::DegenerateData(_))
        ));
    }
}
