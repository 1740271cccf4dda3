//! Relative L1 errors, nested-grid restriction and observed orders.

use super::HarnessError;

/// Relative L1 error `|num - ref|_1 / |equil - ref|_1`, or `/ |ref|_1` when
/// no equilibrium is given. `dx` cancels but is kept for clarity.
pub fn error_norm(num: &[f64], reference: &[f64], equil: Option<&[f64]>, dx: f64) -> Result<f64, HarnessError> {
    if num.len() != reference.len() || equil.is_some_and(|e| e.len() != num.len()) {
        return Err(HarnessError::Study(format!(
            "incongruent arrays: {} vs {}",
            num.len(),
            reference.len()
        )));
    }
    let l1 = |a: &mut dyn Iterator<Item = f64>| a.map(f64::abs).sum::<f64>() * dx;
    let err = l1(&mut num.iter().zip(reference).map(|(a, b)| a - b));
    let den = match equil {
        Some(e) => l1(&mut e.iter().zip(reference).map(|(a, b)| a - b)),
        None => l1(&mut reference.iter().copied()),
    };
    if !(den > 0.0) {
        return Err(HarnessError::Study("error normalisation vanishes".into()));
    }
    Ok(err / den)
}

/// Absolute L1 norm of a difference.
pub fn l1_diff(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

fn ratio(fine: usize, coarse: usize) -> Result<usize, HarnessError> {
    if coarse == 0 || fine % coarse != 0 {
        return Err(HarnessError::Study(format!("grids with {coarse} and {fine} cells do not nest")));
    }
    Ok(fine / coarse)
}

/// Averages `r` consecutive fine cells into each coarse cell.
pub fn restrict_primal(fine: &[f64], n_coarse: usize) -> Result<Vec<f64>, HarnessError> {
    let r = ratio(fine.len(), n_coarse)?;
    Ok(fine.chunks(r).map(|c| c.iter().sum::<f64>() / r as f64).collect())
}

/// Restricts dual-cell averages (`n + 1` slots) to a nested coarse grid.
///
/// A coarse dual cell covers `r - 1` whole fine dual cells and one half of
/// each neighbour; half-cell averages come from the local quadratic. The two
/// boundary slots, whose dual cells stick out of the domain, are copied.
pub fn restrict_dual(fine: &[f64], n_coarse: usize) -> Result<Vec<f64>, HarnessError> {
    let nf = fine.len() - 1;
    let r = ratio(nf, n_coarse)?;
    if r % 2 != 0 {
        return Err(HarnessError::Study(format!("dual restriction needs an even ratio, got {r}")));
    }
    let half = r / 2;
    let get = |j: usize| fine[j.min(nf)];
    // average of the half of dual cell j facing away from slot c
    let half_avg = |j: usize, toward_right: bool| {
        let (l, m, rr) = (get(j.saturating_sub(1)), fine[j], get(j + 1));
        let d = (rr - l) / 8.0;
        if toward_right { m + d } else { m - d }
    };
    Ok((0..=n_coarse)
        .map(|k| {
            let c = k * r;
            if k == 0 || k == n_coarse {
                return fine[c];
            }
            let whole: f64 = (c + 1 - half..c + half).map(|j| fine[j]).sum();
            let left = half_avg(c - half, true);
            let right = half_avg(c + half, false);
            (whole + 0.5 * (left + right)) / r as f64
        })
        .collect())
}

/// `log(e_{k-1}/e_k) / log(n_k/n_{k-1})` for consecutive defined errors.
pub fn observed_orders(levels: &[usize], errors: &[Option<f64>]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| {
            if k == 0 {
                return None;
            }
            match (errors[k - 1], errors[k]) {
                (Some(a), Some(b)) if a > 0.0 && b > 0.0 => {
                    Some((a / b).ln() / (levels[k] as f64 / levels[k - 1] as f64).ln())
                }
                _ => None,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(error_norm(&a, &a, None, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset() {
        // |c| n dx / d with d = |equil - ref|_1
        let r = vec![1.0; 10];
        let num: Vec<f64> = r.iter().map(|v| v + 0.01).collect();
        let eq = vec![1.5; 10];
        let e = error_norm(&num, &r, Some(&eq), 0.2).unwrap();
        assert!((e - 0.01 * 10.0 * 0.2 / (0.5 * 10.0 * 0.2)).abs() < 1e-14);
        assert!(error_norm(&r, &r, Some(&r), 0.1).is_err());
    }

    #[test]
    fn linear_fields_restrict_exactly() {
        let nf = 32;
        let dx = 1.0 / nf as f64;
        let f = |x: f64| 2.0 - 3.0 * x;
        let prim: Vec<f64> = (0..nf).map(|i| f((i as f64 + 0.5) * dx)).collect();
        let dual: Vec<f64> = (0..=nf).map(|k| f(k as f64 * dx)).collect();
        for nc in [16, 8, 4] {
            let dxc = 1.0 / nc as f64;
            let p = restrict_primal(&prim, nc).unwrap();
            let d = restrict_dual(&dual, nc).unwrap();
            for (i, v) in p.iter().enumerate() {
                assert!((v - f((i as f64 + 0.5) * dxc)).abs() < 1e-14);
            }
            for (k, v) in d.iter().enumerate() {
                assert!((v - f(k as f64 * dxc)).abs() < 1e-14);
            }
        }
        assert!(restrict_primal(&prim, 5).is_err());
    }

    #[test]
    fn orders_of_cubic_decay() {
        let levels = [100, 200, 400, 800];
        let errs: Vec<Option<f64>> = levels.iter().map(|&n| Some(7.0 * (n as f64).powi(-3))).collect();
        let o = observed_orders(&levels, &errs);
        assert!(o[0].is_none());
        for v in &o[1..] {
            assert!((v.unwrap() - 3.0).abs() < 1e-12);
        }
    }
}
