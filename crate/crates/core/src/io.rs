//! Plain-text file formats.
//!
//! Every file starts with a one-line header
//! `# bergman-mra <kind> v1 key=value ...` followed by whitespace-separated
//! rows. Floats are written with 17 significant digits, so reading a file
//! and writing it again reproduces it byte for byte.
//!
//! The system cache stores each quad-double value of `C` and of the pivots
//! as its four limbs; the `f64` nodes are stored as written.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{BergmanFunction, KernelExpansion, KernelTerm, TaylorFunction};
use crate::grid::{build_grid, Grid, GridConfig};
use crate::orthonormal::OrthonormalSystem;
use crate::qd::{Cqd, Qd};
use crate::transform::{LevelResidual, Multiresolution, WaveletCoefficients};

pub const FORMAT_VERSION: u32 = 1;

const MAGIC: &str = "bergman-mra";

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_schedule(s: &[usize]) -> String {
    s.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

fn write_header<W: Write>(w: &mut W, kind: &str, fields: &[(&str, String)]) -> Result<()> {
    write!(w, "# {MAGIC} {kind} v{FORMAT_VERSION}")?;
    for (k, v) in fields {
        write!(w, " {k}={v}")?;
    }
    writeln!(w)?;
    Ok(())
}

fn grid_fields(config: &GridConfig) -> Vec<(&'static str, String)> {
    vec![
        ("a", fmt_f64(config.a_base())),
        ("schedule", fmt_schedule(config.schedule())),
        ("levels", config.levels().to_string()),
        ("p", fmt_f64(config.p())),
    ]
}

/// Line reader that skips blank lines and tracks 1-based line numbers.
struct Lines<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    fn new(inner: R) -> Self {
        Self {
            inner,
            line: 0,
            buf: String::new(),
        }
    }

    fn next_row(&mut self) -> Result<Option<Vec<String>>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let t = self.buf.trim();
            if t.is_empty() {
                continue;
            }
            if t.starts_with('#') {
                return Err(self.err("unexpected header line"));
            }
            return Ok(Some(t.split_whitespace().map(str::to_owned).collect()));
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg)
    }

    fn header(&mut self, kind: &str) -> Result<BTreeMap<String, String>> {
        self.buf.clear();
        if self.inner.read_line(&mut self.buf)? == 0 {
            return Err(Error::parse(1, "empty file"));
        }
        self.line = 1;
        let mut parts = self.buf.trim().split_whitespace();
        if parts.next() != Some("#") || parts.next() != Some(MAGIC) {
            return Err(self.err("missing bergman-mra header"));
        }
        match parts.next() {
            Some(k) if k == kind => {}
            Some(k) => return Err(self.err(format!("expected a {kind} file, found {k}"))),
            None => return Err(self.err("header has no file kind")),
        }
        let version = format!("v{FORMAT_VERSION}");
        match parts.next() {
            Some(v) if v == version => {}
            Some(v) => return Err(self.err(format!("unsupported format version {v}"))),
            None => return Err(self.err("header has no version")),
        }
        let mut map = BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| self.err(format!("malformed header field {p:?}")))?;
            map.insert(k.to_owned(), v.to_owned());
        }
        Ok(map)
    }

    fn field<'a>(&self, map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
        map.get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::parse(1, format!("header lacks {key}=")))
    }

    fn expect_cols(&self, row: &[String], n: usize) -> Result<()> {
        if row.len() != n {
            return Err(self.err(format!("expected {n} columns, found {}", row.len())));
        }
        Ok(())
    }

    fn float(&self, s: &str) -> Result<f64> {
        let x: f64 = s
            .parse()
            .map_err(|_| self.err(format!("invalid number {s:?}")))?;
        if !x.is_finite() {
            return Err(self.err(format!("non-finite number {s:?}")));
        }
        Ok(x)
    }

    fn uint(&self, s: &str) -> Result<usize> {
        s.parse()
            .map_err(|_| self.err(format!("invalid index {s:?}")))
    }

    fn complex(&self, re: &str, im: &str) -> Result<Complex64> {
        Ok(Complex64::new(self.float(re)?, self.float(im)?))
    }

    fn qd(&self, limbs: &[String]) -> Result<Qd> {
        let mut l = [0.0; 4];
        for (dst, s) in l.iter_mut().zip(limbs) {
            *dst = self.float(s)?;
        }
        Ok(Qd::from_limbs(l))
    }

    fn finish(&mut self) -> Result<()> {
        if self.next_row()?.is_some() {
            return Err(self.err("trailing data"));
        }
        Ok(())
    }
}

fn parse_grid_header(lines: &Lines<impl BufRead>, map: &BTreeMap<String, String>) -> Result<GridConfig> {
    let a = lines.field(map, "a")?;
    let a: f64 = a
        .parse()
        .map_err(|_| Error::parse(1, format!("invalid base {a:?}")))?;
    let schedule = lines
        .field(map, "schedule")?
        .split(',')
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("invalid schedule entry {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let p = lines.field(map, "p")?;
    let p: f64 = p
        .parse()
        .map_err(|_| Error::parse(1, format!("invalid exponent {p:?}")))?;
    let config = GridConfig::new(a, schedule, p)?;
    if let Some(levels) = map.get("levels") {
        if levels.parse::<usize>().ok() != Some(config.levels()) {
            return Err(Error::parse(1, "levels= disagrees with schedule="));
        }
    }
    Ok(config)
}

fn check_node(lines: &Lines<impl BufRead>, grid: &Grid, m: usize, k: usize, l: usize, z: Complex64) -> Result<()> {
    let info = grid
        .node_of(m)
        .map_err(|_| lines.err(format!("node index {m} is not on the grid")))?;
    if info.k != k || info.l != l {
        return Err(lines.err(format!(
            "row m={m} has (k={k}, l={l}), expected (k={}, l={})",
            info.k, info.l
        )));
    }
    if info.z != z {
        return Err(lines.err(format!("node m={m} differs from the grid node {}", info.z)));
    }
    Ok(())
}

/// Node table: header with `a`, `schedule`, `levels`, `p`, `M`, then rows
/// `m k l re im`.
pub fn write_grid<W: Write>(w: &mut W, grid: &Grid) -> Result<()> {
    let mut fields = grid_fields(grid.config());
    fields.push(("M", grid.len().to_string()));
    write_header(w, "grid", &fields)?;
    for m in 1..=grid.len() {
        let n = grid.node_of(m)?;
        writeln!(w, "{m} {} {} {} {}", n.k, n.l, fmt_f64(n.z.re), fmt_f64(n.z.im))?;
    }
    Ok(())
}

/// Reads a node table and checks every row against the grid its header
/// describes.
pub fn read_grid<R: BufRead>(r: R) -> Result<Grid> {
    let mut lines = Lines::new(r);
    let map = lines.header("grid")?;
    let config = parse_grid_header(&lines, &map)?;
    let grid = build_grid(&config);
    let mut seen = 0;
    while let Some(row) = lines.next_row()? {
        lines.expect_cols(&row, 5)?;
        let m = lines.uint(&row[0])?;
        if m != seen + 1 {
            return Err(lines.err(format!("expected row m={}, found m={m}", seen + 1)));
        }
        let (k, l) = (lines.uint(&row[1])?, lines.uint(&row[2])?);
        let z = lines.complex(&row[3], &row[4])?;
        check_node(&lines, &grid, m, k, l, z)?;
        seen = m;
    }
    if seen != grid.len() {
        return Err(Error::parse(
            lines.line,
            format!("grid has {} nodes, file lists {seen}", grid.len()),
        ));
    }
    Ok(grid)
}

/// Samples `f(z_kl)`: rows `k l re im` in the grid's linear order.
pub fn write_samples<W: Write>(w: &mut W, grid: &Grid, samples: &[Complex64]) -> Result<()> {
    check_len(grid, samples.len())?;
    write_header(w, "samples", &[("M", grid.len().to_string())])?;
    for (i, v) in samples.iter().enumerate() {
        let n = grid.node_of(i + 1)?;
        writeln!(w, "{} {} {} {}", n.k, n.l, fmt_f64(v.re), fmt_f64(v.im))?;
    }
    Ok(())
}

/// Reads samples in any row order; every node of `grid` must appear exactly
/// once.
pub fn read_samples<R: BufRead>(r: R, grid: &Grid) -> Result<Vec<Complex64>> {
    let mut lines = Lines::new(r);
    lines.header("samples")?;
    let mut values: Vec<Option<Complex64>> = vec![None; grid.len()];
    let mut found = 0;
    while let Some(row) = lines.next_row()? {
        lines.expect_cols(&row, 4)?;
        let (k, l) = (lines.uint(&row[0])?, lines.uint(&row[1])?);
        let m = grid
            .linear_index(k, l)
            .map_err(|_| lines.err(format!("node (k={k}, l={l}) is not on the grid")))?;
        let slot = &mut values[m - 1];
        if slot.is_some() {
            return Err(lines.err(format!("node (k={k}, l={l}) appears twice")));
        }
        *slot = Some(lines.complex(&row[2], &row[3])?);
        found += 1;
    }
    collect_complete(grid, values, found)
}

fn collect_complete(grid: &Grid, values: Vec<Option<Complex64>>, found: usize) -> Result<Vec<Complex64>> {
    if let Some(i) = values.iter().position(Option::is_none) {
        let n = grid.node_of(i + 1)?;
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found,
            missing: Some((n.k, n.l)),
        });
    }
    Ok(values.into_iter().flatten().collect())
}

fn check_len(grid: &Grid, n: usize) -> Result<()> {
    if n != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: n,
            missing: None,
        });
    }
    Ok(())
}

/// Wavelet coefficients: rows `m k l re im`.
pub fn write_coefficients<W: Write>(w: &mut W, grid: &Grid, coeffs: &WaveletCoefficients) -> Result<()> {
    check_len(grid, coeffs.len())?;
    write_header(w, "coefficients", &[("M", grid.len().to_string())])?;
    for (i, b) in coeffs.values().iter().enumerate() {
        let n = grid.node_of(i + 1)?;
        writeln!(w, "{} {} {} {} {}", i + 1, n.k, n.l, fmt_f64(b.re), fmt_f64(b.im))?;
    }
    Ok(())
}

pub fn read_coefficients<R: BufRead>(r: R, grid: &Grid) -> Result<WaveletCoefficients> {
    let mut lines = Lines::new(r);
    lines.header("coefficients")?;
    let mut values: Vec<Option<Complex64>> = vec![None; grid.len()];
    let mut found = 0;
    while let Some(row) = lines.next_row()? {
        lines.expect_cols(&row, 5)?;
        let m = lines.uint(&row[0])?;
        let (k, l) = (lines.uint(&row[1])?, lines.uint(&row[2])?);
        if grid.linear_index(k, l).ok() != Some(m) {
            return Err(lines.err(format!("row m={m} does not match node (k={k}, l={l})")));
        }
        let slot = &mut values[m - 1];
        if slot.is_some() {
            return Err(lines.err(format!("coefficient m={m} appears twice")));
        }
        *slot = Some(lines.complex(&row[3], &row[4])?);
        found += 1;
    }
    let values = collect_complete(grid, values, found)?;
    WaveletCoefficients::new(values, grid.level_offsets().to_vec())
}

/// Per-level residuals: rows `n M_n residual_norm`.
pub fn write_error_report<W: Write>(w: &mut W, report: &[LevelResidual]) -> Result<()> {
    write_header(w, "error-report", &[("levels", report.len().to_string())])?;
    for r in report {
        writeln!(w, "{} {} {}", r.level, r.count, fmt_f64(r.residual_norm))?;
    }
    Ok(())
}

/// Reads an error report; `residual_sq` is restored as the square of the
/// stored norm.
pub fn read_error_report<R: BufRead>(r: R) -> Result<Vec<LevelResidual>> {
    let mut lines = Lines::new(r);
    lines.header("error-report")?;
    let mut out = Vec::new();
    while let Some(row) = lines.next_row()? {
        lines.expect_cols(&row, 3)?;
        let norm = lines.float(&row[2])?;
        if norm < 0.0 {
            return Err(lines.err("negative residual norm"));
        }
        out.push(LevelResidual {
            level: lines.uint(&row[0])?,
            count: lines.uint(&row[1])?,
            residual_sq: norm * norm,
            residual_norm: norm,
        });
    }
    Ok(out)
}

/// Point evaluations: rows `re_z im_z re_f im_f`.
pub fn write_evaluations<W: Write>(w: &mut W, points: &[(Complex64, Complex64)]) -> Result<()> {
    write_header(w, "evaluations", &[("points", points.len().to_string())])?;
    for (z, f) in points {
        writeln!(
            w,
            "{} {} {} {}",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(f.re),
            fmt_f64(f.im)
        )?;
    }
    Ok(())
}

pub fn read_evaluations<R: BufRead>(r: R) -> Result<Vec<(Complex64, Complex64)>> {
    let mut lines = Lines::new(r);
    lines.header("evaluations")?;
    let mut out = Vec::new();
    while let Some(row) = lines.next_row()? {
        lines.expect_cols(&row, 4)?;
        out.push((lines.complex(&row[0], &row[1])?, lines.complex(&row[2], &row[3])?));
    }
    Ok(out)
}

/// System cache: grid header fields and `M`, then `node m re im` rows,
/// `pivot m` rows with four limbs, and `c m j` rows (packed lower triangle,
/// row-major) with four limbs for the real part and four for the imaginary
/// part.
pub fn write_system<W: Write>(w: &mut W, mra: &Multiresolution) -> Result<()> {
    let grid = mra.grid();
    let sys = mra.system();
    let mut fields = grid_fields(grid.config());
    fields.push(("M", grid.len().to_string()));
    write_header(w, "system", &fields)?;
    for (i, z) in sys.nodes().iter().enumerate() {
        writeln!(w, "node {} {} {}", i + 1, fmt_f64(z.re), fmt_f64(z.im))?;
    }
    for (i, d) in sys.pivots_qd().iter().enumerate() {
        writeln!(w, "pivot {} {}", i + 1, fmt_limbs(*d))?;
    }
    for (i, row) in sys.coefficients_qd().iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            writeln!(w, "c {} {} {} {}", i + 1, j + 1, fmt_limbs(c.re), fmt_limbs(c.im))?;
        }
    }
    Ok(())
}

fn fmt_limbs(x: Qd) -> String {
    x.limbs().map(fmt_f64).join(" ")
}

/// Reads a system cache; the nodes must be those of the grid in the header.
pub fn read_system<R: BufRead>(r: R) -> Result<Multiresolution> {
    let mut lines = Lines::new(r);
    let map = lines.header("system")?;
    let config = parse_grid_header(&lines, &map)?;
    let grid = build_grid(&config);
    let m_total = lines.field(&map, "M")?;
    if m_total.parse::<usize>().ok() != Some(grid.len()) {
        return Err(Error::parse(1, format!("M={m_total} disagrees with the grid size {}", grid.len())));
    }
    let n = grid.len();

    let mut nodes = Vec::with_capacity(n);
    for i in 1..=n {
        let row = expect_row(&mut lines, "node", i, 4)?;
        nodes.push(lines.complex(&row[2], &row[3])?);
    }
    if nodes != grid.nodes() {
        return Err(Error::parse(lines.line, "cached nodes differ from the grid in the header"));
    }

    let mut pivots = Vec::with_capacity(n);
    for i in 1..=n {
        let row = expect_row(&mut lines, "pivot", i, 6)?;
        pivots.push(lines.qd(&row[2..6])?);
    }

    let mut coeffs = Vec::with_capacity(n);
    for i in 1..=n {
        let mut r = Vec::with_capacity(i);
        for j in 1..=i {
            let row = expect_row(&mut lines, "c", i, 11)?;
            if lines.uint(&row[2])? != j {
                return Err(lines.err(format!("expected entry c {i} {j}")));
            }
            r.push(Cqd::new(lines.qd(&row[3..7])?, lines.qd(&row[7..11])?));
        }
        coeffs.push(r);
    }
    lines.finish()?;

    let system = OrthonormalSystem::from_parts(nodes, coeffs, pivots)?;
    Multiresolution::new(grid, system)
}

fn expect_row<R: BufRead>(lines: &mut Lines<R>, tag: &str, m: usize, cols: usize) -> Result<Vec<String>> {
    let row = lines
        .next_row()?
        .ok_or_else(|| lines.err(format!("file ends before {tag} {m}")))?;
    lines.expect_cols(&row, cols)?;
    if row[0] != tag || lines.uint(&row[1])? != m {
        return Err(lines.err(format!("expected a {tag} row for m={m}")));
    }
    Ok(row)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelLiteral {
    node: [f64; 2],
    coeff: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum FunctionLiteral {
    Taylor(Vec<[f64; 2]>),
    Kernels(Vec<KernelLiteral>),
}

fn c64(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Parses `{"taylor": [[re, im], ...]}` or
/// `{"kernels": [{"node": [re, im], "coeff": [re, im]}, ...]}`.
pub fn parse_function(text: &str) -> Result<BergmanFunction> {
    let lit: FunctionLiteral = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    match lit {
        FunctionLiteral::Taylor(c) => Ok(TaylorFunction::new(c.into_iter().map(c64).collect())?.into()),
        FunctionLiteral::Kernels(k) => Ok(KernelExpansion::new(k.into_iter().map(|t| KernelTerm {
            node: c64(t.node),
            coeff: c64(t.coeff),
        }))?
        .into()),
    }
}

/// Inverse of [`parse_function`].
pub fn function_to_json(f: &BergmanFunction) -> String {
    let lit = match f {
        BergmanFunction::Taylor(t) => FunctionLiteral::Taylor(t.coeffs().iter().map(|c| [c.re, c.im]).collect()),
        BergmanFunction::Kernels(k) => FunctionLiteral::Kernels(
            k.terms()
                .iter()
                .map(|t| KernelLiteral {
                    node: [t.node.re, t.node.im],
                    coeff: [t.coeff.re, t.coeff.im],
                })
                .collect(),
        ),
    };
    serde_json::to_string(&lit).expect("function literal serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{analyze_function, error_report, sample};

    fn small() -> Multiresolution {
        Multiresolution::build(&GridConfig::sqrt2(2).unwrap()).unwrap()
    }

    fn roundtrip<T>(bytes: &[u8], read: impl Fn(&[u8]) -> Result<T>, write: impl Fn(&mut Vec<u8>, &T) -> Result<()>) {
        let value = read(bytes).unwrap();
        let mut again = Vec::new();
        write(&mut again, &value).unwrap();
        assert_eq!(String::from_utf8_lossy(bytes), String::from_utf8_lossy(&again));
    }

    #[test]
    fn grid_roundtrip_and_header() {
        let grid = build_grid(&GridConfig::standard(2).unwrap());
        let mut out = Vec::new();
        write_grid(&mut out, &grid).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("# bergman-mra grid v1 a=2.0000000000000000e0 schedule=1,32,128 levels=2"));
        assert_eq!(text.lines().count(), 162);
        roundtrip(&out, |b| read_grid(b), |w, g| write_grid(w, g));
        assert_eq!(read_grid(&out[..]).unwrap(), grid);
    }

    #[test]
    fn corrupted_grid_is_a_parse_error() {
        let grid = build_grid(&GridConfig::sqrt2(1).unwrap());
        let mut out = Vec::new();
        write_grid(&mut out, &grid).unwrap();
        let text = String::from_utf8(out).unwrap().replacen("0.0000000000000000e0", "zero", 1);
        assert!(matches!(read_grid(text.as_bytes()), Err(Error::Parse { .. })));
        let truncated: String = String::from_utf8({
            let mut o = Vec::new();
            write_grid(&mut o, &grid).unwrap();
            o
        })
        .unwrap()
        .lines()
        .take(3)
        .map(|l| format!("{l}\n"))
        .collect();
        assert!(matches!(read_grid(truncated.as_bytes()), Err(Error::Parse { .. })));
        assert!(matches!(read_grid(&b"m k l re im\n"[..]), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn samples_are_order_insensitive() {
        let mra = small();
        let f = BergmanFunction::from(TaylorFunction::new(vec![Complex64::new(1.0, 0.5), Complex64::new(0.0, 2.0)]).unwrap());
        let s = sample(&f, &mra).unwrap();
        let mut out = Vec::new();
        write_samples(&mut out, mra.grid(), &s).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        let mut rows: Vec<&str> = text.lines().collect();
        let header = rows.remove(0);
        rows.reverse();
        let shuffled = format!("{header}\n{}\n", rows.join("\n"));
        assert_eq!(read_samples(shuffled.as_bytes(), mra.grid()).unwrap(), s);
        roundtrip(&out, |b| read_samples(b, mra.grid()), |w, v| write_samples(w, mra.grid(), v));
    }

    #[test]
    fn missing_sample_names_the_node() {
        let mra = small();
        let s = vec![Complex64::new(1.0, 0.0); mra.len()];
        let mut out = Vec::new();
        write_samples(&mut out, mra.grid(), &s).unwrap();
        let text = String::from_utf8(out).unwrap();
        let dropped: String = text
            .lines()
            .filter(|l| !l.starts_with("1 3 "))
            .map(|l| format!("{l}\n"))
            .collect();
        match read_samples(dropped.as_bytes(), mra.grid()) {
            Err(Error::LengthMismatch {
                missing: Some((1, 3)),
                found,
                ..
            }) => assert_eq!(found, mra.len() - 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coefficients_and_report_roundtrip() {
        let mra = small();
        let f = BergmanFunction::from(KernelExpansion::single(Complex64::new(0.3, -0.2), Complex64::new(1.0, 1.0)).unwrap());
        let b = analyze_function(&f, &mra).unwrap();
        let mut out = Vec::new();
        write_coefficients(&mut out, mra.grid(), &b).unwrap();
        roundtrip(&out, |r| read_coefficients(r, mra.grid()), |w, c| write_coefficients(w, mra.grid(), c));
        assert_eq!(read_coefficients(&out[..], mra.grid()).unwrap().values(), b.values());

        let report = error_report(&f, &mra).unwrap();
        let mut out = Vec::new();
        write_error_report(&mut out, &report).unwrap();
        roundtrip(&out, |r| read_error_report(r), |w, v| write_error_report(w, v));
    }

    #[test]
    fn evaluations_roundtrip() {
        let pts = vec![
            (Complex64::new(0.1, -0.0), Complex64::new(1.0 / 3.0, 2e-300)),
            (Complex64::new(-0.5, 0.25), Complex64::new(-7.0, 1e10)),
        ];
        let mut out = Vec::new();
        write_evaluations(&mut out, &pts).unwrap();
        assert_eq!(read_evaluations(&out[..]).unwrap(), pts);
        roundtrip(&out, |r| read_evaluations(r), |w, v| write_evaluations(w, v));
    }

    #[test]
    fn system_cache_is_lossless() {
        let mra = small();
        let mut out = Vec::new();
        write_system(&mut out, &mra).unwrap();
        let back = read_system(&out[..]).unwrap();
        assert_eq!(back.system().coefficients_qd(), mra.system().coefficients_qd());
        assert_eq!(back.system().pivots_qd(), mra.system().pivots_qd());
        roundtrip(&out, |r| read_system(r), |w, m| write_system(w, m));
    }

    #[test]
    fn single_node_system() {
        let config = GridConfig::new(2.0, vec![1], 2.0).unwrap();
        let mra = Multiresolution::build(&config).unwrap();
        let mut out = Vec::new();
        write_system(&mut out, &mra).unwrap();
        assert_eq!(String::from_utf8_lossy(&out).lines().count(), 4);
        roundtrip(&out, |r| read_system(r), |w, m| write_system(w, m));
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let mra = small();
        let mut out = Vec::new();
        write_grid(&mut out, mra.grid()).unwrap();
        assert!(matches!(read_system(&out[..]), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn function_literals() {
        let t = parse_function(r#"{"taylor": [[1, 0], [0, 0.5]]}"#).unwrap();
        assert_eq!(t.evaluate(Complex64::new(0.5, 0.0)).unwrap(), Complex64::new(1.0, 0.25));
        let k = parse_function(r#"{"kernels": [{"node": [0.5, 0], "coeff": [0.75, 0]}]}"#).unwrap();
        assert!((k.norm() - 1.0).abs() < 1e-14);
        for f in [t, k] {
            assert_eq!(parse_function(&function_to_json(&f)).unwrap(), f);
        }
        assert!(matches!(parse_function(r#"{"taylor": [[1]]}"#), Err(Error::Parse { .. })));
        assert!(matches!(parse_function(r#"{"poly": []}"#), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_function(r#"{"kernels": [{"node": [1.5, 0], "coeff": [1, 0]}]}"#),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
