//! `start:stop:count` grid syntax, endpoints inclusive.

use lpball::error::{Error, Result};

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "grid '{spec}' must have the form start:stop:count"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("grid start '{}' is not a number", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("grid stop '{}' is not a number", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("grid count '{}' is not an integer", parts[2])))?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err(Error::Config("grid endpoints must be finite".into()));
    }
    if count == 0 || count > 1_000_000 {
        return Err(Error::Config(format!(
            "grid count {count} out of range 1..=1000000"
        )));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(Error::Config(format!(
            "grid stop {stop} must exceed start {start}"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_endpoints() {
        let g = parse_grid("1.0:2.0:5").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[4], 2.0);
        assert!((g[1] - 1.25).abs() < 1e-15);
    }

    #[test]
    fn single_point() {
        assert_eq!(parse_grid("3.5:3.5:1").unwrap(), vec![3.5]);
    }

    #[test]
    fn malformed_specs() {
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a:2:3").is_err());
        assert!(parse_grid("1:2:0").is_err());
        assert!(parse_grid("2:1:5").is_err());
    }
}
