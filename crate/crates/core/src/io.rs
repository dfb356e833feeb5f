//! CSV encoding of grid functions.
//!
//! 1D files hold a `# resolution=K` header and `2^K` values, one per line.
//! 2D files hold `# resolution=K dims=2` and `2^K` lines of `2^K` comma-separated
//! values. Values use the shortest decimal that round-trips, so load∘save is exact.

use std::io::{BufRead, Write};

use crate::dyadic::GridSpec;
use crate::error::{Error, Result};
use crate::tensor::GridFunction2D;
use crate::walsh::GridFunction1D;

fn parse_header(line: &str) -> Result<(u32, u32)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# resolution=K' header".into()))?;
    let mut resolution = None;
    let mut dims = 1;
    for field in body.split_whitespace() {
        match field.split_once('=') {
            Some(("resolution", v)) => {
                resolution = Some(v.parse().map_err(|_| Error::Parse(format!("bad resolution '{v}'")))?)
            }
            Some(("dims", v)) => dims = v.parse().map_err(|_| Error::Parse(format!("bad dims '{v}'")))?,
            _ => return Err(Error::Parse(format!("unexpected header field '{field}'"))),
        }
    }
    let resolution = resolution.ok_or_else(|| Error::Parse("header lacks resolution".into()))?;
    Ok((resolution, dims))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: '{}' is not a number", token.trim())))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("line {line}: non-finite value")))
    }
}

fn data_lines<R: BufRead>(reader: R) -> Result<(String, Vec<(usize, String)>)> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse("empty file".into())),
    };
    let mut data = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if !line.trim().is_empty() {
            data.push((i + 1, line));
        }
    }
    Ok((header, data))
}

pub fn write_grid_1d<W: Write>(f: &GridFunction1D, mut out: W) -> Result<()> {
    writeln!(out, "# resolution={}", f.spec().resolution())?;
    for v in f.samples() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub fn read_grid_1d<R: BufRead>(reader: R) -> Result<GridFunction1D> {
    let (header, data) = data_lines(reader)?;
    let (resolution, dims) = parse_header(&header)?;
    if dims != 1 {
        return Err(Error::Parse(format!("expected a 1D grid, header says dims={dims}")));
    }
    let spec = GridSpec::new(resolution)?;
    let samples = data
        .iter()
        .map(|(i, l)| parse_value(l, *i))
        .collect::<Result<Vec<_>>>()?;
    GridFunction1D::new(spec, samples)
}

pub fn write_grid_2d<W: Write>(f: &GridFunction2D, mut out: W) -> Result<()> {
    writeln!(out, "# resolution={} dims=2", f.spec().resolution())?;
    for row in f.samples().chunks(f.side()) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_grid_2d<R: BufRead>(reader: R) -> Result<GridFunction2D> {
    let (header, data) = data_lines(reader)?;
    let (resolution, dims) = parse_header(&header)?;
    if dims != 2 {
        return Err(Error::Parse(format!("expected a 2D grid, header says dims={dims}")));
    }
    let spec = GridSpec::new(resolution)?;
    if data.len() != spec.size() {
        return Err(Error::LengthMismatch {
            expected: spec.size(),
            got: data.len(),
        });
    }
    let mut samples = Vec::with_capacity(spec.size() * spec.size());
    for (i, line) in &data {
        let before = samples.len();
        for token in line.split(',') {
            samples.push(parse_value(token, *i)?);
        }
        if samples.len() - before != spec.size() {
            return Err(Error::Parse(format!(
                "line {i}: expected {} values, got {}",
                spec.size(),
                samples.len() - before
            )));
        }
    }
    GridFunction2D::new(spec, samples)
}

pub fn save_grid_1d(f: &GridFunction1D, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_grid_1d(f, std::io::BufWriter::new(file))
}

pub fn load_grid_1d(path: &std::path::Path) -> Result<GridFunction1D> {
    read_grid_1d(std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn save_grid_2d(f: &GridFunction2D, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_grid_2d(f, std::io::BufWriter::new(file))
}

pub fn load_grid_2d(path: &std::path::Path) -> Result<GridFunction2D> {
    read_grid_2d(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_signed, random_signed_2d};

    #[test]
    fn round_trip_1d() {
        let f = random_signed(GridSpec::new(5).unwrap(), 3).scale(1e-7);
        let mut buf = Vec::new();
        write_grid_1d(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# resolution=5\n"));
        assert_eq!(text.lines().count(), 33);
        assert_eq!(read_grid_1d(&buf[..]).unwrap(), f);
    }

    #[test]
    fn round_trip_2d() {
        let f = random_signed_2d(GridSpec::new(3).unwrap(), 9);
        let mut buf = Vec::new();
        write_grid_2d(&f, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("# resolution=3 dims=2\n"));
        assert_eq!(read_grid_2d(&buf[..]).unwrap(), f);
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_grid_1d(&b""[..]).is_err());
        assert!(read_grid_1d(&b"1\n2\n"[..]).is_err());
        assert!(read_grid_1d(&b"# resolution=1\n1\n"[..]).is_err());
        assert!(read_grid_1d(&b"# resolution=1\n1\nx\n"[..]).is_err());
        assert!(read_grid_1d(&b"# resolution=1 dims=2\n1,2\n3,4\n"[..]).is_err());
        assert!(read_grid_2d(&b"# resolution=1 dims=2\n1,2\n3\n"[..]).is_err());
        assert!(read_grid_1d(&b"# resolution=1\n1\ninf\n"[..]).is_err());
        assert!(read_grid_1d(&b"# resolution=1\n1\n2\n"[..]).is_ok());
    }
}
