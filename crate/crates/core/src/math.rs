//! Floating-point helpers usable without `std`.

/// Round half away from zero, the rounding rule used everywhere in the codec.
#[inline]
pub fn round_half_away(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// Rounds and clamps a real sample into `[0, max]`.
#[inline]
pub fn to_sample(x: f64, max: i64) -> i64 {
    let r = round_half_away(x);
    if r.is_nan() || r < 0.0 {
        0
    } else if r > max as f64 {
        max
    } else {
        r as i64
    }
}

/// Lower median: the element at index `(n - 1) / 2` of the sorted values.
/// Always one of the observed values. `None` for an empty slice.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: alloc::vec::Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

pub fn l2_norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(0.5), 1.0);
        assert_eq!(round_half_away(-0.5), -1.0);
        assert_eq!(round_half_away(2.5), 3.0);
        assert_eq!(round_half_away(-2.49), -2.0);
    }

    #[test]
    fn lower_median_picks_observed_value() {
        assert_eq!(lower_median(&[4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[9.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&[]), None);
    }

    #[test]
    fn sample_clamping() {
        assert_eq!(to_sample(-3.2, 255), 0);
        assert_eq!(to_sample(255.6, 255), 255);
        assert_eq!(to_sample(17.5, 255), 18);
    }
}
