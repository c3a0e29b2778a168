//! Thin wrappers over `libm` so the crate builds without `std`.

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn tan(x: f64) -> f64 {
    libm::tan(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `|x|^e` for `e >= 0`, using repeated multiplication when `e` is a small integer.
#[inline]
pub(crate) fn abs_pow(x: f64, e: f64) -> f64 {
    let ax = x.abs();
    if e == 0.0 {
        return 1.0;
    }
    let r = round(e);
    if r == e && (1.0..=8.0).contains(&e) {
        let mut acc = ax;
        let mut k = 1;
        while (k as f64) < e {
            acc *= ax;
            k += 1;
        }
        acc
    } else {
        powf(ax, e)
    }
}
