//! CSV output: header row from the record's field names, one row per
//! record, floats in shortest round-trip form.

use serde::Serialize;

use crate::error::CliError;

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        t: f64,
        ok: bool,
    }

    #[test]
    fn header_and_full_precision() {
        let text = to_csv(&[Row { t: 0.1, ok: true }, Row { t: 1.0 / 3.0, ok: false }]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,ok");
        assert_eq!(lines[1], "0.1,true");
        let back: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
