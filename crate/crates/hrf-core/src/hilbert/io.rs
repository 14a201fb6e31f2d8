//! CSV persistence for sample sets and spectral-basis caches.
//!
//! Sample sets: a `#`-prefixed header carrying grid geometry and provenance,
//! then one row per sample with 17-significant-digit decimal values, which
//! round-trip `f64` exactly.

use super::{make_uniform_grid, Grid, GridFunction, SampleSet, SpectralBasis};
use crate::{Error, Result};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sample_set_csv(set: &SampleSet, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let g = set.grid();
    writeln!(
        w,
        "# grid_n={} a={} b={} seed={} kind={}",
        g.n(),
        g.a(),
        g.b(),
        set.seed(),
        set.kind()
    )?;
    for item in set.items() {
        let row: Vec<String> = item.values().iter().map(|&v| fmt17(v)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_header(line: &str) -> Result<(usize, f64, f64, u64, String)> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '#' header line".into()))?;
    let mut n = None;
    let mut a = None;
    let mut b = None;
    let mut seed = None;
    let mut kind = None;
    for tok in body.split_whitespace() {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header token '{tok}'")))?;
        match key {
            "grid_n" => n = Some(value.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
            "a" => a = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            "b" => b = Some(value.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?)
            }
            "kind" => kind = Some(value.to_string()),
            "k" => {}
            other => return Err(Error::Parse(format!("unknown header key '{other}'"))),
        }
    }
    Ok((
        n.ok_or_else(|| Error::Parse("header missing grid_n".into()))?,
        a.ok_or_else(|| Error::Parse("header missing a".into()))?,
        b.ok_or_else(|| Error::Parse("header missing b".into()))?,
        seed.unwrap_or(0),
        kind.unwrap_or_else(|| "unknown".into()),
    ))
}

pub fn read_sample_set_csv(path: &Path) -> Result<SampleSet> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty sample set file".into()))??;
    let (n, a, b, seed, kind) = parse_header(&header)?;
    let grid = make_uniform_grid(n, a, b)?;
    let mut items = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        items.push(GridFunction::new(&grid, values)?);
    }
    SampleSet::new(&grid, items, kind, seed)
}

/// Basis cache rows: `lambda_i, e_i(p_1), ..., e_i(p_n)`.
pub fn write_basis_csv(basis: &SpectralBasis, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let g = basis.grid();
    writeln!(w, "# grid_n={} a={} b={} k={}", g.n(), g.a(), g.b(), basis.k())?;
    for i in 0..basis.k() {
        let mut row = Vec::with_capacity(1 + g.n());
        row.push(fmt17(basis.eigenvalue(i)));
        row.extend(basis.func_values(i).iter().map(|&v| fmt17(v)));
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_basis_csv(path: &Path) -> Result<(Arc<Grid>, SpectralBasis)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty basis file".into()))??;
    let (n, a, b, _, _) = parse_header(&header)?;
    let grid = make_uniform_grid(n, a, b)?;
    let mut eigenvalues = Vec::new();
    let mut funcs = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<_>>()?;
        if row.len() != n + 1 {
            return Err(Error::Parse(format!(
                "basis row has {} fields, expected {}",
                row.len(),
                n + 1
            )));
        }
        eigenvalues.push(row[0]);
        funcs.push(row[1..].to_vec());
    }
    let basis = SpectralBasis::new(&grid, eigenvalues, funcs)?;
    Ok((grid, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{eigendecompose, sample_gaussian, DenseMatrix, GaussianMeasure};
    use crate::rng::DetRng;

    #[test]
    fn sample_set_roundtrip_is_bit_exact() {
        let grid = make_uniform_grid(9, 0.0, 1.0).unwrap();
        let basis = Arc::new(eigendecompose(&DenseMatrix::identity(9), &grid, 4).unwrap());
        let m = GaussianMeasure::centered(&basis);
        let set = sample_gaussian(&m, 7, &mut DetRng::new(13)).unwrap();

        let dir = std::env::temp_dir().join("hrf_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("set.csv");
        write_sample_set_csv(&set, &path).unwrap();
        let back = read_sample_set_csv(&path).unwrap();

        assert_eq!(back.len(), set.len());
        assert_eq!(back.kind(), set.kind());
        assert_eq!(back.seed(), set.seed());
        for i in 0..set.len() {
            for j in 0..grid.n() {
                assert_eq!(
                    set.item(i).values()[j].to_bits(),
                    back.item(i).values()[j].to_bits()
                );
            }
        }
    }

    #[test]
    fn basis_roundtrip_is_bit_exact() {
        let grid = make_uniform_grid(6, -1.0, 2.0).unwrap();
        let basis = eigendecompose(&DenseMatrix::identity(6), &grid, 3).unwrap();
        let dir = std::env::temp_dir().join("hrf_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("basis.csv");
        write_basis_csv(&basis, &path).unwrap();
        let (g2, b2) = read_basis_csv(&path).unwrap();
        assert_eq!(g2.n(), 6);
        assert_eq!(b2.k(), 3);
        for i in 0..3 {
            assert_eq!(b2.eigenvalue(i).to_bits(), basis.eigenvalue(i).to_bits());
            for j in 0..6 {
                assert_eq!(
                    b2.func_values(i)[j].to_bits(),
                    basis.func_values(i)[j].to_bits()
                );
            }
        }
    }
}
