//! Number rendering for CSV artifacts.

/// Fixed 17-significant-digit scientific rendering, the one float convention
/// used in CSV output. Infinities print as "inf" / "-inf".
pub fn float17(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::float17;

    #[test]
    fn renders_seventeen_significant_digits() {
        assert_eq!(float17(0.25), "2.5000000000000000e-1");
        assert_eq!(float17(0.0), "0.0000000000000000e0");
        assert_eq!(float17(f64::INFINITY), "inf");
        let third: f64 = 1.0 / 3.0;
        assert_eq!(float17(third).parse::<f64>().unwrap(), third);
    }
}
