use super::GaussianChannel;
use crate::gdof::c_of;
use crate::{Error, Result};

/// Genie-aided sum-rate bound obtained by giving the relay's received
/// signal `h_r·X_r + Z` to both destinations.
pub fn upper_bound_sumrate(ch: &GaussianChannel) -> Result<f64> {
    if ch.h_c == 0.0 {
        return Err(Error::DegenerateChannel("the bound needs h_c != 0".into()));
    }
    let ratio = ch.h_d / ch.h_c;
    let (hd2, hc2, hr2) = (ch.h_d * ch.h_d, ch.h_c * ch.h_c, ch.h_r * ch.h_r);
    Ok(c_of(ratio * ratio + (ratio - 1.0).powi(2))?
        + c_of(1.0 + ch.power * (hd2 + hc2))?
        + c_of(ch.power * hr2)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_direct_and_cross_gains() {
        let ch = GaussianChannel::new(2.0, 2.0, 0.0, 1.0, 1e-300).unwrap();
        let ub = upper_bound_sumrate(&ch).unwrap();
        // First term C(1) = ½, second C(1 + tiny) → ½, third 0.
        assert!((ub - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_point() {
        // h_d²P = 1e4, h_c²P = 1e6, h_r²P = 1e8
        let ch = GaussianChannel::new(1.0, 10.0, 100.0, 1.0, 1e4).unwrap();
        let c = |x: f64| 0.5 * (1.0 + x).log2();
        let want = c(0.01 + 0.81) + c(1.0 + 1.01e6) + c(1e8);
        assert!((upper_bound_sumrate(&ch).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn vanishing_power_limit() {
        let ch = GaussianChannel::new(1.0, 3.0, 5.0, 1.0, 1e-12).unwrap();
        let r = 1.0f64 / 3.0;
        let first = 0.5 * (1.0 + r * r + (r - 1.0).powi(2)).log2();
        let ub = upper_bound_sumrate(&ch).unwrap();
        assert!((ub - first - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_cross_gain_is_rejected() {
        let ch = GaussianChannel::new(1.0, 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            upper_bound_sumrate(&ch),
            Err(Error::DegenerateChannel(_))
        ));
    }
}
