use crate::error::{ForecastError, Result};

fn check(values: &[f64], anchor: &[f64]) -> Result<()> {
    if values.len() != anchor.len() {
        return Err(ForecastError::Shape(format!(
            "{} values against {} anchor entries",
            values.len(),
            anchor.len()
        )));
    }
    match anchor.iter().position(|&a| !(a > 0.0 && a.is_finite())) {
        Some(index) => Err(ForecastError::DegenerateAnchor {
            index,
            value: anchor[index],
        }),
        None => Ok(()),
    }
}

/// Relative change of `load` against `anchor`: `load / anchor - 1`.
pub fn afore_encode(load: &[f64], anchor: &[f64]) -> Result<Vec<f64>> {
    check(load, anchor)?;
    Ok(load.iter().zip(anchor).map(|(l, a)| l / a - 1.0).collect())
}

/// Inverse of [`afore_encode`]: `anchor * (pct + 1)`.
pub fn afore_decode(pct: &[f64], anchor: &[f64]) -> Result<Vec<f64>> {
    check(pct, anchor)?;
    Ok(pct.iter().zip(anchor).map(|(p, a)| a * (p + 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spot_values() {
        assert_eq!(afore_encode(&[5.0, 7.5], &[5.0, 7.5]).unwrap(), vec![0.0, 0.0]);
        assert!((afore_encode(&[110.0], &[100.0]).unwrap()[0] - 0.10).abs() < 1e-15);
        assert_eq!(afore_decode(&[0.0; 3], &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(afore_decode(&[-0.05], &[200.0]).unwrap(), vec![190.0]);
    }

    #[test]
    fn nonpositive_anchor_rejected() {
        for bad in [0.0, -3.0, f64::NAN] {
            let mut anchor = vec![1.0; 24];
            anchor[9] = bad;
            match afore_encode(&[1.0; 24], &anchor) {
                Err(ForecastError::DegenerateAnchor { index, .. }) => assert_eq!(index, 9),
                other => panic!("{other:?}"),
            }
            assert!(afore_decode(&[0.0; 24], &anchor).is_err());
        }
        assert!(matches!(afore_encode(&[1.0; 3], &[1.0; 4]), Err(ForecastError::Shape(_))));
    }

    proptest! {
        #[test]
        fn encode_matches_oracle_and_round_trips(
            pairs in prop::collection::vec((1e-3f64..1e5, 1e-3f64..1e5), 24)
        ) {
            let (load, anchor): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let pct = afore_encode(&load, &anchor).unwrap();
            for i in 0..24 {
                let oracle = (load[i] - anchor[i]) / anchor[i];
                prop_assert!((pct[i] - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
            }
            let back = afore_decode(&pct, &anchor).unwrap();
            for (b, l) in back.iter().zip(&load) {
                prop_assert!((b - l).abs() <= 1e-9 * l);
            }
        }
    }
}
