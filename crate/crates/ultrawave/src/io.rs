//! CSV formats for grid functions, coefficients, kernels, spectra and
//! exported stepwise functions.
//!
//! Every file starts with a fixed header row. Addresses use the tree-wide
//! rendering rule (digits concatenated, dotted above branching 10; the top
//! vertex is the empty string). Doubles are written in Rust's shortest
//! round-trip form, so `parse(format(x)) == x` bit-exactly; rationals are
//! written as `p/q`. Writers emit rows in canonical order, so repeated runs
//! produce byte-identical files.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use num_rational::BigRational;

use crate::changevar::{rho_id, PiecewiseConstantFn};
use crate::error::{Error, Result};
use crate::operator::RadialKernel;
use crate::tree::{format_rational, parse_rational, TreeAddress, TreeHandle, UltrametricTree};
use crate::wavelet::{GridFunction, WaveletCoefficients};

pub const GRID_HEADER: &str = "leaf_address,re,im";
pub const COEFF_HEADER: &str = "vertex_address,j,re,im";
pub const KERNEL_HEADER: &str = "vertex_address,value";
pub const SPECTRUM_HEADER: &str = "vertex_address,lambda,lambda_integral,diff";
pub const PIECEWISE_HEADER: &str = "t_left,t_right,re,im,t_left_exact,t_right_exact";
pub const RHO_MAP_HEADER: &str = "leaf_address,t_exact,t_decimal";
pub const TREE_SUMMARY_HEADER: &str = "vertex_address,depth,branching,is_leaf,measure";

/// Reserved first field of the mean-coefficient row.
pub const MEAN_ROW_TAG: &str = "MEAN";

pub fn write_grid_csv<W: Write>(w: &mut W, f: &GridFunction) -> Result<()> {
    writeln!(w, "{GRID_HEADER}")?;
    let tree = f.tree();
    for (leaf, value) in tree.enumerate_leaves().iter().zip(f.values()) {
        writeln!(w, "{},{},{}", tree.format_address(leaf), value.re, value.im)?;
    }
    Ok(())
}

pub fn read_grid_csv<R: BufRead>(r: R, tree: &TreeHandle, file: &str) -> Result<GridFunction> {
    let mut values = vec![None; tree.leaf_count()];
    for (line_no, line) in csv_rows(r, file, GRID_HEADER)? {
        let fields = split_fields(&line, 3, file, line_no)?;
        let addr = parse_tree_address(tree, fields[0], file, line_no)?;
        let v = tree
            .resolve(&addr)
            .map_err(|e| csv_err(file, line_no, e.to_string()))?;
        if !tree.is_leaf(&addr).unwrap_or(false) {
            return Err(csv_err(
                file,
                line_no,
                format!("`{}` is not a leaf address", fields[0]),
            ));
        }
        let slot = tree.leaf_span_of(v).0 as usize;
        if values[slot].is_some() {
            return Err(csv_err(
                file,
                line_no,
                format!("duplicate leaf `{}`", fields[0]),
            ));
        }
        values[slot] = Some(Complex64::new(
            parse_f64(fields[1], file, line_no)?,
            parse_f64(fields[2], file, line_no)?,
        ));
    }
    let leaves = tree.enumerate_leaves();
    let values: Vec<Complex64> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| {
                csv_err(
                    file,
                    0,
                    format!("missing leaf `{}`", tree.format_address(&leaves[i])),
                )
            })
        })
        .collect::<Result<_>>()?;
    GridFunction::new(tree, values)
}

/// Coefficient rows in canonical order, preceded by the reserved
/// `MEAN,0,re,im` row.
pub fn write_coefficients_csv<W: Write>(w: &mut W, coeffs: &WaveletCoefficients) -> Result<()> {
    writeln!(w, "{COEFF_HEADER}")?;
    let mean = coeffs.mean();
    writeln!(w, "{MEAN_ROW_TAG},0,{},{}", mean.re, mean.im)?;
    let tree = coeffs.tree();
    for (idx, value) in coeffs.entries() {
        writeln!(
            w,
            "{},{},{},{}",
            tree.format_address(&idx.vertex),
            idx.j,
            value.re,
            value.im
        )?;
    }
    Ok(())
}

pub fn read_coefficients_csv<R: BufRead>(
    r: R,
    tree: &TreeHandle,
    file: &str,
) -> Result<WaveletCoefficients> {
    let mut coeffs = WaveletCoefficients::zeros(tree);
    let mut seen = vec![false; tree.wavelet_count()];
    let mut mean_seen = false;
    let mut slot_order = std::collections::HashMap::new();
    for (slot, (idx, _)) in coeffs.entries().enumerate() {
        slot_order.insert((idx.vertex.clone(), idx.j), slot);
    }
    let entries: Vec<_> = crate::wavelet::indices(tree);

    for (line_no, line) in csv_rows(r, file, COEFF_HEADER)? {
        let fields = split_fields(&line, 4, file, line_no)?;
        let re = parse_f64(fields[2], file, line_no)?;
        let im = parse_f64(fields[3], file, line_no)?;
        if fields[0] == MEAN_ROW_TAG {
            if mean_seen {
                return Err(csv_err(file, line_no, "duplicate MEAN row".into()));
            }
            mean_seen = true;
            coeffs.set_mean(Complex64::new(re, im));
            continue;
        }
        let vertex = parse_tree_address(tree, fields[0], file, line_no)?;
        let j: u32 = fields[1]
            .parse()
            .map_err(|_| csv_err(file, line_no, format!("bad frequency `{}`", fields[1])))?;
        let key = (vertex.clone(), j);
        let slot = *slot_order
            .get(&key)
            .ok_or_else(|| csv_err(file, line_no, format!("unknown index `{line}`")))?;
        if seen[slot] {
            return Err(csv_err(file, line_no, format!("duplicate index `{line}`")));
        }
        seen[slot] = true;
        coeffs
            .set(
                &crate::wavelet::WaveletIndex::new(vertex, j),
                Complex64::new(re, im),
            )
            .map_err(|e| csv_err(file, line_no, e.to_string()))?;
    }
    if !mean_seen {
        return Err(csv_err(file, 0, "missing MEAN row".into()));
    }
    if let Some(slot) = seen.iter().position(|s| !s) {
        let idx = &entries[slot];
        return Err(Error::MissingCoefficient {
            vertex: tree.format_address(&idx.vertex),
            j: idx.j,
        });
    }
    Ok(coeffs)
}

pub fn write_kernel_csv<W: Write>(w: &mut W, kernel: &RadialKernel) -> Result<()> {
    writeln!(w, "{KERNEL_HEADER}")?;
    let tree = kernel.tree();
    for (vertex, value) in kernel.entries() {
        writeln!(w, "{},{}", tree.format_address(&vertex), value)?;
    }
    Ok(())
}

pub fn read_kernel_csv<R: BufRead>(r: R, tree: &TreeHandle, file: &str) -> Result<RadialKernel> {
    let mut entries = Vec::new();
    for (line_no, line) in csv_rows(r, file, KERNEL_HEADER)? {
        let fields = split_fields(&line, 2, file, line_no)?;
        let vertex = parse_tree_address(tree, fields[0], file, line_no)?;
        let value = parse_f64(fields[1], file, line_no)?;
        if value < 0.0 {
            return Err(Error::NegativeKernel {
                vertex: fields[0].to_string(),
                value,
            });
        }
        entries.push((vertex, value));
    }
    RadialKernel::explicit(tree, &entries)
}

/// Spectrum rows `(vertex, λ_series, λ_integral)`; the written `diff` column
/// is the absolute difference of the two formulas.
pub fn write_spectrum_csv<W: Write>(
    w: &mut W,
    tree: &UltrametricTree,
    rows: &[(TreeAddress, f64, f64)],
) -> Result<()> {
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for (vertex, series, integral) in rows {
        writeln!(
            w,
            "{},{},{},{}",
            tree.format_address(vertex),
            series,
            integral,
            (series - integral).abs()
        )?;
    }
    Ok(())
}

pub fn write_piecewise_csv<W: Write>(
    w: &mut W,
    f: &PiecewiseConstantFn,
    precision: usize,
) -> Result<()> {
    writeln!(w, "{PIECEWISE_HEADER}")?;
    for (left, right, value) in f.pieces() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            rational_decimal(left, precision),
            rational_decimal(right, precision),
            value.re,
            value.im,
            format_rational(left),
            format_rational(right),
        )?;
    }
    Ok(())
}

/// The `leaf → t` table of the change of variable.
pub fn write_rho_map_csv<W: Write>(
    w: &mut W,
    tree: &UltrametricTree,
    precision: usize,
) -> Result<()> {
    writeln!(w, "{RHO_MAP_HEADER}")?;
    for &leaf in tree.leaf_ids() {
        let t = rho_id(tree, leaf);
        writeln!(
            w,
            "{},{},{}",
            tree.format_address(&tree.address_of(leaf)),
            format_rational(&t),
            rational_decimal(&t, precision),
        )?;
    }
    Ok(())
}

/// Per-vertex measures table in depth-first preorder.
pub fn write_tree_summary_csv<W: Write>(w: &mut W, tree: &UltrametricTree) -> Result<()> {
    writeln!(w, "{TREE_SUMMARY_HEADER}")?;
    let mut stack = vec![0u32];
    while let Some(v) = stack.pop() {
        let addr = tree.address_of(v);
        writeln!(
            w,
            "{},{},{},{},{}",
            tree.format_address(&addr),
            tree.depth_of(v),
            tree.branching_of(v),
            tree.is_leaf_id(v),
            format_rational(tree.measure_of(v)),
        )?;
        for k in (0..tree.branching_of(v)).rev() {
            stack.push(tree.child_id(v, k));
        }
    }
    Ok(())
}

/// Exact truncated decimal expansion of a rational, `digits` places after the
/// point. Independent of floating point.
pub fn rational_decimal(r: &BigRational, digits: usize) -> String {
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};
    let negative = r.is_negative();
    let abs = r.abs();
    let mut int_part = abs.numer() / abs.denom();
    let mut rem = abs.numer() - &int_part * abs.denom();
    let mut out = String::new();
    if negative && (!int_part.is_zero() || !rem.is_zero()) {
        out.push('-');
    }
    out.push_str(&int_part.to_string());
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            int_part = &rem / abs.denom();
            rem -= &int_part * abs.denom();
            out.push_str(&int_part.to_string());
        }
    }
    out
}

// ---- shared row machinery ----

fn csv_err(file: &str, line: usize, msg: String) -> Error {
    Error::Csv {
        file: file.to_string(),
        line,
        msg,
    }
}

/// Read all rows after checking the header line; returns (1-based line, row).
fn csv_rows<R: BufRead>(r: R, file: &str, header: &str) -> Result<Vec<(usize, String)>> {
    let mut rows = Vec::new();
    let mut lines = r.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim_end() == header => {}
        Some((_, Ok(first))) => {
            return Err(csv_err(
                file,
                1,
                format!("expected header `{header}`, found `{first}`"),
            ))
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => return Err(csv_err(file, 1, format!("empty file, expected `{header}`"))),
    }
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push((i + 1, line));
    }
    Ok(rows)
}

fn split_fields<'a>(
    line: &'a str,
    want: usize,
    file: &str,
    line_no: usize,
) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != want {
        return Err(csv_err(
            file,
            line_no,
            format!("expected {want} fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

fn parse_f64(s: &str, file: &str, line_no: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| csv_err(file, line_no, format!("bad number `{s}`")))
}

fn parse_tree_address(
    tree: &UltrametricTree,
    s: &str,
    file: &str,
    line_no: usize,
) -> Result<TreeAddress> {
    tree.parse_address(s)
        .map_err(|e| csv_err(file, line_no, e.to_string()))
}

/// Parse a rational field (`p/q` or integer).
pub fn parse_rational_field(s: &str, file: &str, line_no: usize) -> Result<BigRational> {
    parse_rational(s).map_err(|e| csv_err(file, line_no, e.to_string()))
}
