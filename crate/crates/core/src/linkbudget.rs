//! Link budget relations in the logarithmic domain.
//!
//! Powers are dBm, antenna gains dBi, losses dB. Only
//! [`received_power_inverse_square`] leaves the log domain.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Terms of the received-power sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkBudget {
    /// P_T, dBm
    pub tx_power: f64,
    /// C_T, cable/connector/switch losses on the transmit side
    pub tx_losses: f64,
    /// G_T
    pub tx_gain: f64,
    /// PL_FS
    pub path_loss_fs: f64,
    /// PL_Div, excess loss from obstruction and diffraction
    pub path_loss_div: f64,
    /// G_R
    pub rx_gain: f64,
    /// C_R
    pub rx_losses: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("tx_power", self.tx_power),
            ("tx_losses", self.tx_losses),
            ("tx_gain", self.tx_gain),
            ("path_loss_fs", self.path_loss_fs),
            ("path_loss_div", self.path_loss_div),
            ("rx_gain", self.rx_gain),
            ("rx_losses", self.rx_losses),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(invalid(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in [("tx_losses", self.tx_losses), ("rx_losses", self.rx_losses)] {
            if v < 0.0 {
                return Err(invalid(format!("{name} = {v} must be non-negative")));
            }
        }
        Ok(())
    }

    /// P_R = P_T − C_T + G_T − PL_FS − PL_Div + G_R − C_R, in dBm.
    pub fn received_power(&self) -> f64 {
        self.tx_power - self.tx_losses + self.tx_gain - self.path_loss_fs - self.path_loss_div + self.rx_gain
            - self.rx_losses
    }
}

pub fn received_power(budget: &LinkBudget) -> f64 {
    budget.received_power()
}

fn check_link(d: f64, f: f64) -> Result<()> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(invalid(format!("distance {d} m must be positive")));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid(format!("frequency {f} Hz must be positive")));
    }
    Ok(())
}

/// Free-space path loss in dB: 20 lg d + 20 lg f − 20 lg(c / 4π).
pub fn free_space_path_loss(d: f64, f: f64) -> Result<f64> {
    check_link(d, f)?;
    Ok(20.0 * d.log10() + 20.0 * f.log10() - 20.0 * (SPEED_OF_LIGHT / (4.0 * PI)).log10())
}

/// Received power between isotropic antennas from the linear spherical
/// spreading law, P_R = P_T · (c / 4πdf)².
pub fn received_power_inverse_square(tx_power_dbm: f64, d: f64, f: f64) -> Result<f64> {
    check_link(d, f)?;
    if !tx_power_dbm.is_finite() {
        return Err(invalid("tx power must be finite"));
    }
    let tx_mw = 10f64.powf(tx_power_dbm / 10.0);
    let spread = SPEED_OF_LIGHT / (4.0 * PI * d * f);
    let rx_mw = tx_mw * spread * spread;
    Ok(10.0 * rx_mw.log10())
}

/// G = 10 lg(D · η).
pub fn gain_from_directivity(directivity: f64, efficiency: f64) -> Result<f64> {
    if !(directivity > 0.0 && directivity.is_finite()) {
        return Err(invalid(format!("directivity {directivity} must be positive")));
    }
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(invalid(format!("efficiency {efficiency} must lie in (0, 1]")));
    }
    Ok(10.0 * (directivity * efficiency).log10())
}

/// D = U / U_i.
pub fn directivity_ratio(intensity: f64, isotropic_intensity: f64) -> Result<f64> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(invalid(format!("radiation intensity {intensity} must be positive")));
    }
    if !(isotropic_intensity > 0.0 && isotropic_intensity.is_finite()) {
        return Err(invalid(format!(
            "isotropic intensity {isotropic_intensity} must be positive"
        )));
    }
    Ok(intensity / isotropic_intensity)
}

/// Factor by which free-space range grows for `delta` dB of extra margin.
pub fn distance_ratio_for_gain(delta: f64) -> f64 {
    10f64.powf(delta / 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 20·lg(4πdf/c), evaluated in Python.
    const FSPL_1M: f64 = 47.86482345472626;
    const FSPL_100M: f64 = 87.86482345472626;
    const FSPL_127M: f64 = 89.94089787384539;

    #[test]
    fn fspl_examples() {
        assert!((free_space_path_loss(100.0, 5.9e9).unwrap() - FSPL_100M).abs() < 1e-9);
        assert!((free_space_path_loss(127.0, 5.9e9).unwrap() - FSPL_127M).abs() < 1e-9);
        assert!((free_space_path_loss(1.0, 5.9e9).unwrap() - FSPL_1M).abs() < 1e-9);
    }

    #[test]
    fn fspl_rejects_bad_input() {
        assert!(free_space_path_loss(0.0, 5.9e9).is_err());
        assert!(free_space_path_loss(-3.0, 5.9e9).is_err());
        assert!(free_space_path_loss(10.0, 0.0).is_err());
        assert!(free_space_path_loss(f64::NAN, 1.0).is_err());
        assert!(received_power_inverse_square(0.0, 0.0, 5.9e9).is_err());
        assert!(received_power_inverse_square(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn received_power_examples() {
        assert_eq!(LinkBudget::default().received_power(), 0.0);
        let b = LinkBudget {
            tx_power: 0.0,
            tx_losses: 2.5,
            tx_gain: 11.0,
            path_loss_fs: FSPL_127M,
            path_loss_div: 0.0,
            rx_gain: 16.0,
            rx_losses: 0.0,
        };
        assert!((received_power(&b) - -65.44089787384539).abs() < 1e-9);
        let iso = LinkBudget {
            path_loss_fs: free_space_path_loss(100.0, 5.9e9).unwrap(),
            ..LinkBudget::default()
        };
        assert!((iso.received_power() + FSPL_100M).abs() < 1e-9);
    }

    #[test]
    fn budget_validation() {
        assert!(LinkBudget::default().validate().is_ok());
        let neg = LinkBudget {
            rx_losses: -1.0,
            ..LinkBudget::default()
        };
        assert!(neg.validate().is_err());
        let nan = LinkBudget {
            tx_gain: f64::NAN,
            ..LinkBudget::default()
        };
        assert!(nan.validate().is_err());
    }

    #[test]
    fn inverse_square_examples() {
        let p100 = received_power_inverse_square(0.0, 100.0, 5.9e9).unwrap();
        assert!((p100 + FSPL_100M).abs() < 1e-9);
        let p200 = received_power_inverse_square(0.0, 200.0, 5.9e9).unwrap();
        assert!((p200 - -93.88542336800589).abs() < 1e-9);
        assert!((p100 - p200 - 6.020599913279624).abs() < 1e-9);
        let p10 = received_power_inverse_square(10.0, 100.0, 5.9e9).unwrap();
        assert!((p10 - (10.0 - FSPL_100M)).abs() < 1e-9);
    }

    #[test]
    fn directivity_examples() {
        assert_eq!(gain_from_directivity(1.0, 1.0).unwrap(), 0.0);
        assert!((gain_from_directivity(10.0, 1.0).unwrap() - 10.0).abs() < 1e-12);
        // 10·lg(12.589) = 10.99991...; 12.589 is 10^(11/10) to five figures.
        assert!((gain_from_directivity(12.589, 1.0).unwrap() - 11.0).abs() < 1e-3);
        assert!(gain_from_directivity(1.0, 1.5).is_err());
        assert!(gain_from_directivity(1.0, 0.0).is_err());
        assert!(gain_from_directivity(0.0, 0.5).is_err());

        assert_eq!(directivity_ratio(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(directivity_ratio(5.0, 2.5).unwrap(), 2.0);
        let d = directivity_ratio(12.589, 1.0).unwrap();
        assert!((gain_from_directivity(d, 1.0).unwrap() - 11.0).abs() < 1e-3);
        assert!(directivity_ratio(0.0, 1.0).is_err());
        assert!(directivity_ratio(1.0, -1.0).is_err());
    }

    #[test]
    fn distance_ratio_examples() {
        assert_eq!(distance_ratio_for_gain(0.0), 1.0);
        assert!((distance_ratio_for_gain(6.020599913279624) - 2.0).abs() < 1e-12);
        assert!((distance_ratio_for_gain(8.0) - 2.51188643150958).abs() < 1e-12);
    }
}
