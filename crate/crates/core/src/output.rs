//! Timeseries CSV and state snapshot files.
//!
//! Binary snapshot layout, all little-endian:
//!
//! ```text
//! b"CHIS0001" | dim: u64 | nx: u64 | [ny: u64 if dim = 2] | h: f64 | t: f64
//! | u[0..N]: f64 | v[0..N]: f64 | w[0..N]: f64
//! ```
//!
//! The CSV snapshot carries the same header as a leading `#` comment line
//! followed by `x,y,u,v,w` rows; floats are printed in shortest round-trip
//! form so both formats reload bit-exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::functionals::{DiagnosticsRecord, Trajectory};
use crate::grid::{Field, GridSpec};
use crate::stepper::State;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"CHIS0001";

/// Column order of the diagnostics timeseries.
pub const TIMESERIES_HEADER: [&str; 20] = [
    "t",
    "mass",
    "u_linf",
    "v_linf",
    "w_linf",
    "u_l2",
    "v_l2",
    "w_l2",
    "E_p",
    "F_p",
    "dirichlet_p",
    "fisher",
    "cross_vw",
    "grad_v_sq",
    "cum_vw",
    "cum_grad_v_sq",
    "cum_fisher",
    "dist_u",
    "dist_v",
    "dist_w",
];

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn timeseries_row(r: &DiagnosticsRecord) -> [f64; 20] {
    [
        r.t,
        r.mass,
        r.u_linf,
        r.v_linf,
        r.w_linf,
        r.u_l2,
        r.v_l2,
        r.w_l2,
        r.lyapunov,
        r.sublinear,
        r.dirichlet_p,
        r.fisher,
        r.cross_vw,
        r.grad_v_sq,
        r.cumulative.cross_vw,
        r.cumulative.grad_v_sq,
        r.cumulative.fisher,
        r.dist_u,
        r.dist_v,
        r.dist_w,
    ]
}

pub fn write_timeseries<W: Write>(traj: &Trajectory, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMESERIES_HEADER)?;
    for r in &traj.samples {
        w.write_record(timeseries_row(r).iter().map(|x| fmt17(*x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one CSV row per diagnostic sample.
pub fn emit_timeseries(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    write_timeseries(traj, BufWriter::new(File::create(path)?))
}

/// Parsed timeseries CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| Error::Snapshot {
                    path: path.as_ref().to_path_buf(),
                    reason: format!("bad number `{s}`: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn snap_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Snapshot {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Writes `state`; `.csv` selects the text form, anything else the binary form.
pub fn emit_snapshot(state: &State, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path)?);
    let g = state.grid();
    if is_csv(path) {
        writeln!(
            out,
            "# dim={} nx={} ny={} h={:?} t={:?}",
            g.dim(),
            g.nx(),
            g.ny(),
            g.spacing(),
            state.t
        )?;
        writeln!(out, "x,y,u,v,w")?;
        for k in 0..g.len() {
            let [x, y] = g.center(k);
            writeln!(
                out,
                "{x:?},{y:?},{:?},{:?},{:?}",
                state.u.values()[k],
                state.v.values()[k],
                state.w.values()[k]
            )?;
        }
    } else {
        out.write_all(SNAPSHOT_MAGIC)?;
        out.write_all(&(g.dim() as u64).to_le_bytes())?;
        out.write_all(&(g.nx() as u64).to_le_bytes())?;
        if g.dim() == 2 {
            out.write_all(&(g.ny() as u64).to_le_bytes())?;
        }
        out.write_all(&g.spacing().to_le_bytes())?;
        out.write_all(&state.t.to_le_bytes())?;
        for f in [&state.u, &state.v, &state.w] {
            for x in f.values() {
                out.write_all(&x.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn grid_from_header(path: &Path, dim: u64, nx: u64, ny: u64, h: f64) -> Result<GridSpec> {
    let (nx, ny) = (nx as usize, ny as usize);
    match dim {
        1 => GridSpec::line(nx as f64 * h, nx),
        2 => GridSpec::rect(nx as f64 * h, ny as f64 * h, nx, ny),
        d => Err(snap_err(path, format!("unsupported dimension {d}"))),
    }
}

/// Reads a snapshot written by [`emit_snapshot`].
pub fn read_snapshot(path: impl AsRef<Path>) -> Result<State> {
    let path = path.as_ref();
    if is_csv(path) {
        return read_snapshot_csv(path);
    }
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let mut cur = bytes.as_slice();
    let mut take = |n: usize| -> Result<&[u8]> {
        if cur.len() < n {
            return Err(snap_err(path, "truncated"));
        }
        let (a, b) = cur.split_at(n);
        cur = b;
        Ok(a)
    };
    if take(8)? != SNAPSHOT_MAGIC {
        return Err(snap_err(path, "bad magic"));
    }
    let u64_at = |b: &[u8]| u64::from_le_bytes(b.try_into().expect("8 bytes"));
    let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    let dim = u64_at(take(8)?);
    let nx = u64_at(take(8)?);
    let ny = if dim == 2 { u64_at(take(8)?) } else { 1 };
    let h = f64_at(take(8)?);
    let t = f64_at(take(8)?);
    let grid = grid_from_header(path, dim, nx, ny, h)?;
    let n = grid.len();
    let mut fields = Vec::with_capacity(3);
    for _ in 0..3 {
        let raw = take(8 * n)?;
        fields.push(Field::new(grid, raw.chunks_exact(8).map(f64_at).collect())?);
    }
    if !cur.is_empty() {
        return Err(snap_err(path, "trailing bytes"));
    }
    let w = fields.pop().expect("3 fields");
    let v = fields.pop().expect("3 fields");
    let u = fields.pop().expect("3 fields");
    Ok(State::new(u, v, w).at(t))
}

fn read_snapshot_csv(path: &Path) -> Result<State> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let first = lines.next().ok_or_else(|| snap_err(path, "empty file"))??;
    let meta = first
        .strip_prefix('#')
        .ok_or_else(|| snap_err(path, "missing header comment"))?;
    let mut dim = None;
    let mut nx = None;
    let mut ny = None;
    let mut h = None;
    let mut t = None;
    for kv in meta.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| snap_err(path, format!("bad header item `{kv}`")))?;
        let bad = |_| snap_err(path, format!("bad header value `{kv}`"));
        match k {
            "dim" => dim = Some(v.parse::<u64>().map_err(bad)?),
            "nx" => nx = Some(v.parse::<u64>().map_err(bad)?),
            "ny" => ny = Some(v.parse::<u64>().map_err(bad)?),
            "h" => h = Some(v.parse::<f64>().map_err(|_| snap_err(path, "bad h"))?),
            "t" => t = Some(v.parse::<f64>().map_err(|_| snap_err(path, "bad t"))?),
            _ => return Err(snap_err(path, format!("unknown header key `{k}`"))),
        }
    }
    let missing = |k| snap_err(path, format!("header lacks `{k}`"));
    let grid = grid_from_header(
        path,
        dim.ok_or_else(|| missing("dim"))?,
        nx.ok_or_else(|| missing("nx"))?,
        ny.unwrap_or(1),
        h.ok_or_else(|| missing("h"))?,
    )?;
    let _columns = lines
        .next()
        .ok_or_else(|| snap_err(path, "missing column header"))??;
    let n = grid.len();
    let (mut u, mut v, mut w) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(snap_err(
                path,
                format!("expected 5 columns, got {}", cols.len()),
            ));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| snap_err(path, format!("bad number `{s}`")))
        };
        u.push(num(cols[2])?);
        v.push(num(cols[3])?);
        w.push(num(cols[4])?);
    }
    if u.len() != n {
        return Err(snap_err(
            path,
            format!("header announces {n} cells, file has {}", u.len()),
        ));
    }
    Ok(State::new(
        Field::new(grid, u)?,
        Field::new(grid, v)?,
        Field::new(grid, w)?,
    )
    .at(t.ok_or_else(|| missing("t"))?))
}

/// Reads a snapshot and requires it to live on `expected`.
pub fn read_snapshot_on(path: impl AsRef<Path>, expected: &GridSpec) -> Result<State> {
    let path = path.as_ref();
    let s = read_snapshot(path)?;
    let g = s.grid();
    let same = g.dim() == expected.dim()
        && g.nx() == expected.nx()
        && g.ny() == expected.ny()
        && ((g.spacing() - expected.spacing()) / expected.spacing()).abs() <= 1e-12;
    if !same {
        return Err(snap_err(
            path,
            format!(
                "grid mismatch: file has dim={} nx={} ny={}, expected dim={} nx={} ny={}",
                g.dim(),
                g.nx(),
                g.ny(),
                expected.dim(),
                expected.nx(),
                expected.ny()
            ),
        ));
    }
    let rewrap = |f: Field| Field::from_raw(*expected, f.into_values());
    let t = s.t;
    Ok(State::new(rewrap(s.u), rewrap(s.v), rewrap(s.w)).at(t))
}

/// Per-run output directory `<root>/<name>`, created on demand.
pub fn run_dir(root: impl AsRef<Path>, name: &str) -> Result<PathBuf> {
    let d = root.as_ref().join(name);
    std::fs::create_dir_all(&d)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_state(dim: usize) -> State {
        let g = if dim == 1 {
            GridSpec::line(1.0, 7).unwrap()
        } else {
            GridSpec::rect(1.5, 1.0, 9, 6).unwrap()
        };
        State::new(
            Field::from_fn(g, |x, y| 1.0 / 3.0 + x.sin() * y.cos()),
            Field::from_fn(g, |x, _| (x * 1e-7).exp() - 1.0),
            Field::from_fn(g, |x, y| x * y + 1e-300),
        )
        .at(0.1 + 0.2)
    }

    #[test]
    fn snapshot_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let s = sample_state(dim);
            for name in ["s.bin", "s.csv"] {
                let p = dir.path().join(format!("{dim}{name}"));
                emit_snapshot(&s, &p).unwrap();
                let back = read_snapshot_on(&p, s.grid()).unwrap();
                assert_eq!(back, s, "{name}");
            }
        }
    }

    #[test]
    fn snapshot_grid_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        emit_snapshot(&sample_state(1), &p).unwrap();
        let other = GridSpec::line(1.0, 8).unwrap();
        assert!(matches!(
            read_snapshot_on(&p, &other),
            Err(Error::Snapshot { .. })
        ));
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("junk.bin");
        std::fs::write(&p, b"NOTCHIS!\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(read_snapshot(&p), Err(Error::Snapshot { .. })));
    }
}
