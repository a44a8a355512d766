/// Twelve significant digits; plain decimal for decimal exponents in `[-5, 15)`, scientific otherwise.
pub fn sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{mant}e{e}")
    }
}
