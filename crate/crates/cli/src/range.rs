//! `start:stop:step` ranges and comma lists of numbers.

/// Values closer than this to `stop` count as reaching it.
const STOP_TOL: f64 = 1e-9;

/// Parses either a single number, a comma list, or `start:stop:step`.
/// Ranges include `start` and exclude `stop`.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        return parse_range(text);
    }
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}

fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(format!("range must be start:stop:step, got {text:?}"));
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(format!("range needs finite bounds and a positive step, got {text:?}"));
    }
    let mut out = Vec::new();
    for i in 0.. {
        // Index-based to avoid drift; rounding strips representation noise.
        let v = round10(start + step * i as f64);
        if v >= stop - STOP_TOL {
            break;
        }
        out.push(v);
    }
    Ok(out)
}

fn round10(v: f64) -> f64 {
    (v * 1e10).round() / 1e10
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_exclude_stop() {
        let v = parse_values("0.8:3.2:0.2").unwrap();
        assert_eq!(v.len(), 12);
        assert_eq!(v[0], 0.8);
        assert_eq!(v[3], 1.4);
        assert_eq!(*v.last().unwrap(), 3.0);
        assert_eq!(parse_values("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75]);
        // 0.1 · 3 lands within rounding of 0.3.
        assert_eq!(parse_values("0:0.3:0.1").unwrap(), vec![0.0, 0.1, 0.2]);
        assert!(parse_values("1:1:0.1").unwrap().is_empty());
    }

    #[test]
    fn lists_and_singletons() {
        assert_eq!(parse_values("0.3, 0.6667,0.8").unwrap(), vec![0.3, 0.6667, 0.8]);
        assert_eq!(parse_values("2").unwrap(), vec![2.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_values("1:2").is_err());
        assert!(parse_values("1:2:0").is_err());
        assert!(parse_values("1:2:-1").is_err());
        assert!(parse_values("a,b").is_err());
    }
}
