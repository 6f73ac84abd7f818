use num_rational::Ratio;

use crate::error::{Error, Result};

/// Degree of the polynomial in q through the sample points `(q, count)`,
/// by exact Newton divided differences. At least one sample must be spare:
/// the fitted degree has to be at most `n − 2` for `n` samples, otherwise
/// the data do not witness polynomial behaviour. `None` means the zero
/// polynomial.
pub fn interpolate_degree(samples: &[(u64, u64)]) -> Result<Option<usize>> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Inconsistent("need at least two samples".into()));
    }
    let xs: Vec<i128> = samples.iter().map(|&(q, _)| q as i128).collect();
    for i in 0..n {
        for j in i + 1..n {
            if xs[i] == xs[j] {
                return Err(Error::Inconsistent(format!("repeated sample at q = {}", xs[i])));
            }
        }
    }
    let mut table: Vec<Ratio<i128>> = samples.iter().map(|&(_, c)| Ratio::from_integer(c as i128)).collect();
    let mut coeffs = vec![table[0]];
    for k in 1..n {
        for i in 0..n - k {
            table[i] = (table[i + 1] - table[i]) / Ratio::from_integer(xs[i + k] - xs[i]);
        }
        coeffs.push(table[0]);
    }
    // the Newton form's top nonzero coefficient gives the degree
    let deg = coeffs.iter().rposition(|c| *c != Ratio::from_integer(0));
    match deg {
        None => Ok(None),
        Some(d) if d + 2 <= n => Ok(Some(d)),
        Some(d) => Err(Error::Inconsistent(format!(
            "degree {d} fitted with no spare sample among {n}"
        ))),
    }
}
