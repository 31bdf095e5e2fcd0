use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

/// Seventeen significant digits: every `f64` round-trips.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> String {
    format!("{},{}", num(z.re), num(z.im))
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn opt_complex(z: Option<Complex64>) -> String {
    z.map(complex).unwrap_or_else(|| ",".into())
}

/// Writes via a temporary file in the target directory and a rename, so a
/// reader never sees a partial file. Without a path the text goes to stdout.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 0.0, 12345.678] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17);
        }
        assert_eq!(opt_complex(None), ",");
        assert_eq!(complex(Complex64::new(1.0, -2.0)).matches(',').count(), 1);
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit(Some(&path), "first\n").unwrap();
        emit(Some(&path), "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
