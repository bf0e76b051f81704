//! Physical constants and dB helpers.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Standard reference temperature for noise figures, K.
pub const REFERENCE_TEMPERATURE: f64 = 290.0;

/// Linear power ratio to dB. Zero maps to negative infinity.
#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Watts to dBm.
#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    to_db(watts) + 30.0
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    from_db(dbm - 30.0)
}
