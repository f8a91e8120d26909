use super::{Element, FeatureMap};

/// Numerically stable softmax over a row, in place. NaN inputs propagate.
pub fn softmax_in_place<T: Element>(row: &mut [T]) {
    let max = row.iter().fold(T::neg_infinity(), |m, &v| if v > m || v.is_nan() { v } else { m });
    let mut sum = T::zero();
    for v in row.iter_mut() {
        *v = (*v - max).exp();
        sum = sum + *v;
    }
    for v in row.iter_mut() {
        *v = *v / sum;
    }
}

/// Softmax along the width axis of a rank-4 map.
pub fn softmax_lastdim<T: Element>(t: &FeatureMap<T>) -> FeatureMap<T> {
    let mut out = t.clone();
    let w = t.width();
    for row in out.data_mut().chunks_mut(w) {
        softmax_in_place(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_row_is_uniform() {
        let mut row = [0.0f64; 9];
        softmax_in_place(&mut row);
        for v in row {
            assert!((v - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn log_three_gap() {
        let x = 0.37;
        let mut row = [x, x + 3f64.ln()];
        softmax_in_place(&mut row);
        assert!((row[0] - 0.25).abs() < 1e-12);
        assert!((row[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn large_logits_do_not_overflow() {
        let mut row = [1000.0f64, 1000.0, 999.0];
        softmax_in_place(&mut row);
        assert!(row.iter().all(|v| v.is_finite()));
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nan_propagates() {
        let mut row = [0.0f64, f64::NAN, 1.0];
        softmax_in_place(&mut row);
        assert!(row.iter().all(|v| v.is_nan()));
    }

    #[test]
    fn rank4_rows_sum_to_one() {
        let t = FeatureMap::<f64>::random([2, 3, 4, 7], 21).unwrap().scale(5.0);
        let s = softmax_lastdim(&t);
        for row in s.data().chunks(7) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&v| v > 0.0));
        }
    }
}
