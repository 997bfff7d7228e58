use csdd_core::learn::Dataset;

use super::{parse_err, IoError, IoResult};
use crate::vars::VarTable;

fn csv_err(e: csv::Error) -> IoError {
    let line = e.position().map_or(1, |p| p.line() as usize);
    parse_err(line, e.to_string())
}

/// CSV with a header of variable names and an optional trailing `count`
/// column. With `vars`, the header may list the variables in any order but
/// must name each exactly once; without it the header defines the variables.
pub fn read_dataset(text: &str, vars: Option<&VarTable>) -> IoResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(parse_err(1, "missing header"));
    }
    let counted = header.last().is_some_and(|h| h == "count");
    let names = &header[..header.len() - usize::from(counted)];
    if let Some(i) = header[..header.len() - 1].iter().position(|h| h == "count") {
        return Err(parse_err(
            1,
            format!("`count` must be the last column, found at column {}", i + 1),
        ));
    }
    // column -> variable index
    let (table, column_var): (VarTable, Vec<usize>) = match vars {
        None => {
            let t = VarTable::new(names.to_vec()).map_err(|e| match e {
                IoError::Parse { message, .. } => parse_err(1, message),
                e => e,
            })?;
            (t, (0..names.len()).collect())
        }
        Some(t) => {
            let mut cols = Vec::with_capacity(names.len());
            for n in names {
                let x = t
                    .lookup(n)
                    .ok_or_else(|| parse_err(1, format!("unknown column `{n}`")))?;
                if cols.contains(&(x as usize - 1)) {
                    return Err(parse_err(1, format!("duplicate column `{n}`")));
                }
                cols.push(x as usize - 1);
            }
            if let Some(missing) = t.names().iter().find(|n| !names.contains(n)) {
                return Err(parse_err(1, format!("missing column `{missing}`")));
            }
            (t.clone(), cols)
        }
    };
    let mut data = Dataset::new(table.names().to_vec());
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut row = vec![false; names.len()];
        for (j, cell) in rec.iter().take(names.len()).enumerate() {
            row[column_var[j]] = match cell {
                "0" => false,
                "1" => true,
                v => {
                    return Err(parse_err(
                        line,
                        format!("column `{}`: expected 0 or 1, got `{v}`", names[j]),
                    ))
                }
            };
        }
        let count = if counted {
            let c = &rec[names.len()];
            match c.parse::<u64>() {
                Ok(k) if k >= 1 => k,
                _ => {
                    return Err(parse_err(
                        line,
                        format!("count must be a positive integer, got `{c}`"),
                    ))
                }
            }
        } else {
            1
        };
        data.push(row, count)?;
    }
    Ok(data)
}

/// Header, then one line per entry with its count. Entries with a zero
/// count are left out, since the format has no way to express them.
pub fn write_dataset(d: &Dataset) -> String {
    let mut out = d.names().join(",");
    out.push_str(",count\n");
    for (row, k) in d.rows().filter(|&(_, k)| k > 0) {
        for &b in row {
            out.push(if b { '1' } else { '0' });
            out.push(',');
        }
        out.push_str(&k.to_string());
        out.push('\n');
    }
    out
}
