use super::EvalError;

fn check_pair(x: &[f64], y: &[f64], min: usize) -> Result<(), EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min {
        return Err(EvalError::TooShort {
            needed: min,
            got: x.len(),
        });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson correlation.
pub fn pcc(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    check_pair(x, y, 2)?;
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(EvalError::Constant("first"));
    }
    if syy == 0.0 {
        return Err(EvalError::Constant("second"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of the positions they span.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end, averaged.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn srocc(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    check_pair(x, y, 2)?;
    pcc(&average_ranks(x), &average_ranks(y))
}

pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64, EvalError> {
    check_pair(predicted, actual, 1)?;
    let sse: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sse / predicted.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        assert!((pcc(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((pcc(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((pcc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert!((srocc(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        let tied = srocc(&[1.0, 2.0, 3.0], &[5.0, 5.0, 9.0]).unwrap();
        assert!((tied - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(rmse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[1.5, 2.5], &[1.5, 2.5]).unwrap(), 0.0);
        assert!(
            (rmse(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - (14.0f64 / 3.0).sqrt()).abs()
                < 1e-12
        );
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[5.0, 5.0, 9.0]), vec![1.5, 1.5, 3.0]);
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 3.0]),
            vec![3.0, 1.0, 3.0, 3.0]
        );
    }

    #[test]
    fn degenerate_inputs_are_errors() {
        assert!(matches!(
            pcc(&[1.0, 1.0], &[1.0, 2.0]),
            Err(EvalError::Constant(_))
        ));
        assert!(matches!(
            srocc(&[1.0, 2.0], &[3.0, 3.0]),
            Err(EvalError::Constant(_))
        ));
        assert!(matches!(
            pcc(&[1.0], &[1.0]),
            Err(EvalError::TooShort { .. })
        ));
        assert!(matches!(
            rmse(&[1.0], &[1.0, 2.0]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(rmse(&[], &[]).is_err());
    }

    fn vectors() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (3usize..30).prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn correlations_invariant_under_positive_affine((x, y) in vectors(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let r = pcc(&x, &y);
            prop_assume!(r.is_ok());
            let xt: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pcc(&xt, &y).unwrap() - r.unwrap()).abs() < 1e-12);
            let s = srocc(&x, &y).unwrap();
            let cubed: Vec<f64> = x.iter().map(|v| v.powi(3) + v).collect();
            prop_assert!((srocc(&cubed, &y).unwrap() - s).abs() < 1e-12);
            prop_assert!((srocc(&xt, &y).unwrap() - s).abs() < 1e-12);
        }

        #[test]
        fn rmse_symmetric_and_triangle(n in 1usize..30, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut v = || (0..n).map(|_| rng.random_range(-10.0..10.0)).collect::<Vec<f64>>();
            let (a, b, c) = (v(), v(), v());
            prop_assert_eq!(rmse(&a, &b).unwrap(), rmse(&b, &a).unwrap());
            prop_assert!(rmse(&a, &c).unwrap() <= rmse(&a, &b).unwrap() + rmse(&b, &c).unwrap() + 1e-12);
        }
    }
}
