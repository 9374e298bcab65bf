//! Gnuplot-ready data blocks and script stubs.

use std::fmt::Write as _;

use crate::error::CliError;
use crate::output::{format_float, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    /// Base name; files are `<name>.dat` and `<name>.gp`.
    pub name: String,
    pub title: String,
    pub x: String,
    pub series: Vec<String>,
    /// Column whose distinct values split the data into separate blocks.
    pub group_by: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotFiles {
    pub data_name: String,
    pub data: String,
    pub script_name: String,
    pub script: String,
}

fn lookup(table: &Table, name: &str) -> Result<usize, CliError> {
    table.column_index(name).ok_or_else(|| {
        CliError::Schema(format!(
            "plot column `{name}` not in table (columns: {})",
            table.columns.join(", ")
        ))
    })
}

/// Renders `table` as whitespace-separated blocks. With `group_by`, rows
/// sharing a group value (in first-appearance order) form one block and
/// blocks are separated by two blank lines, addressable as gnuplot `index`.
pub fn emit_plot_data(table: &Table, spec: &PlotSpec) -> Result<PlotFiles, CliError> {
    let x = lookup(table, &spec.x)?;
    let ys: Vec<usize> = spec.series.iter().map(|s| lookup(table, s)).collect::<Result<_, _>>()?;
    let group = spec.group_by.as_deref().map(|g| lookup(table, g)).transpose()?;

    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        let key = group.map_or_else(String::new, |g| row[g].render());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, rows)) => rows.push(r),
            None => groups.push((key, vec![r])),
        }
    }

    let mut data = String::new();
    writeln!(data, "# {}", spec.title).unwrap();
    writeln!(data, "# columns: {} {}", spec.x, spec.series.join(" ")).unwrap();
    for (b, (key, rows)) in groups.iter().enumerate() {
        if b > 0 {
            data.push_str("\n\n");
        }
        if let Some(g) = &spec.group_by {
            writeln!(data, "# {g} = {key}").unwrap();
        }
        for &r in rows {
            let row = &table.rows[r];
            let cells: Vec<String> = std::iter::once(x)
                .chain(ys.iter().copied())
                .map(|c| row[c].as_f64().map_or_else(|| "NaN".to_string(), format_float))
                .collect();
            writeln!(data, "{}", cells.join(" ")).unwrap();
        }
    }

    let data_name = format!("{}.dat", spec.name);
    let mut script = String::new();
    writeln!(script, "# gnuplot script for {data_name}").unwrap();
    writeln!(script, "set title \"{}\"", spec.title).unwrap();
    writeln!(script, "set xlabel \"{}\"", spec.x).unwrap();
    let mut clauses = Vec::new();
    let blocks = groups.len().max(1);
    for b in 0..blocks {
        for (k, s) in spec.series.iter().enumerate() {
            let label = match (&spec.group_by, groups.get(b)) {
                (Some(g), Some((key, _))) => format!("{s}, {g}={key}"),
                _ => s.clone(),
            };
            clauses.push(format!("'{data_name}' index {b} using 1:{} with lines title \"{label}\"", k + 2));
        }
    }
    if groups.is_empty() {
        writeln!(script, "# no data rows").unwrap();
    } else {
        writeln!(script, "plot {}", clauses.join(", \\\n     ")).unwrap();
    }
    Ok(PlotFiles {
        data_name,
        data,
        script_name: format!("{}.gp", spec.name),
        script,
    })
}
