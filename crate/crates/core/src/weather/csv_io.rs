use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{WeatherRecord, WeatherSeries};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Required input columns, in canonical order.
pub const WEATHER_COLUMNS: [&str; 4] = ["date", "rain_mm", "temp_c", "humidity_pct"];

/// Reads `date,rain_mm,temp_c,humidity_pct` rows. Lines starting with `#`
/// are ignored; columns may appear in any order.
pub fn read_weather_csv<T: Scalar, R: Read>(reader: R) -> Result<WeatherSeries<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(WEATHER_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(idx[i]).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|e| Error::Data {
            line,
            message: format!("bad date `{}`: {e}", field(0)),
        })?;
        let num = |i: usize| -> Result<T> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .and_then(T::from_f64)
                .ok_or_else(|| Error::Data {
                    line,
                    message: format!("bad {} value `{}`", WEATHER_COLUMNS[i], field(i)),
                })
        };
        let rec = WeatherRecord {
            date,
            rain: num(1)?,
            temp: num(2)?,
            humidity: num(3)?,
        };
        if rec.rain < T::zero() {
            return Err(Error::Data {
                line,
                message: format!("negative rainfall {}", rec.rain),
            });
        }
        if rec.humidity < T::zero() || rec.humidity > T::lit(100.0) {
            return Err(Error::Data {
                line,
                message: format!("humidity {} outside [0, 100]", rec.humidity),
            });
        }
        records.push(rec);
    }
    WeatherSeries::new(records)
}

pub fn write_weather_csv<T: Scalar, W: Write>(series: &WeatherSeries<T>, mut out: W) -> Result<()> {
    writeln!(out, "{}", WEATHER_COLUMNS.join(","))?;
    for r in series.records() {
        writeln!(out, "{},{},{},{}", r.date, r.rain, r.temp, r.humidity)?;
    }
    Ok(())
}
