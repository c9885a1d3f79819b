use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::DesignIoError;

/// Published characteristics of a static benchmark region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub name: String,
    pub source: String,
    /// GCell extent, e.g. `2x2`.
    pub size: String,
    pub nets: u32,
    pub pins: u32,
    pub sparsity: f64,
    pub llx: i64,
    pub lly: i64,
    pub urx: i64,
    pub ury: i64,
}

pub fn sparsity(total_nodes: u64, net_count: u64) -> Result<f64, DesignIoError> {
    if net_count == 0 {
        return Err(DesignIoError::UndefinedSparsity);
    }
    Ok(total_nodes as f64 / net_count as f64)
}

/// The static-region table, as metadata; the geometry behind it is not shipped.
pub fn static_benchmarks() -> Vec<BenchmarkRow> {
    let rows: [(&str, &str, &str, u32, u32, f64, [i64; 4]); 10] = [
        ("Region1", "ISPD-2018 test1", "1x1", 36, 30, 1628.40, [199500, 245100, 205200, 250800]),
        ("Region2", "ISPD-2018 test1", "1x1", 49, 51, 1104.48, [142500, 233700, 148200, 239400]),
        ("Region3", "ISPD-2018 test1", "1x1", 49, 66, 394.88, [148200, 210900, 153900, 216600]),
        ("Region4", "ISPD-2019 test3", "2x2", 58, 75, 3663.60, [138000, 132000, 144000, 138000]),
        ("Region5", "ISPD-2019 test3", "2x2", 67, 101, 2484.00, [96000, 186000, 102000, 192000]),
        ("Region6", "ISPD-2019 test3", "2x2", 73, 122, 1994.33, [108000, 186000, 114000, 192000]),
        ("Region7", "ISPD-2018 test5", "3x3", 63, 124, 1245.56, [1566000, 639000, 1575000, 648000]),
        ("Region8", "ISPD-2018 test5", "3x3", 55, 127, 846.82, [1332000, 1224000, 1341000, 1233000]),
        ("Region9", "ISPD-2019 test7", "3x3", 133, 285, 765.74, [612000, 1314000, 621000, 1323000]),
        ("Region10", "ISPD-2019 test7", "3x3", 137, 281, 651.61, [648000, 1386000, 657000, 1395000]),
    ];
    rows.into_iter()
        .map(|(name, source, size, nets, pins, sparsity, b)| BenchmarkRow {
            name: name.into(),
            source: source.into(),
            size: size.into(),
            nets,
            pins,
            sparsity,
            llx: b[0],
            lly: b[1],
            urx: b[2],
            ury: b[3],
        })
        .collect()
}

/// Reads `name,source,size,nets,pins,sparsity,llx,lly,urx,ury` rows.
pub fn read_benchmark_csv(reader: impl Read) -> Result<Vec<BenchmarkRow>, DesignIoError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers().map_err(|e| DesignIoError::Csv(e.to_string()))?.clone();
    let expected = ["name", "source", "size", "nets", "pins", "sparsity", "llx", "lly", "urx", "ury"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(DesignIoError::Csv(format!("unexpected header {:?}", headers)));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        let row: BenchmarkRow = rec.map_err(|e| DesignIoError::Csv(e.to_string()))?;
        if !(row.sparsity > 0.0) {
            return Err(DesignIoError::Csv(format!("{}: sparsity must be positive", row.name)));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_benchmark_csv(rows: &[BenchmarkRow], writer: impl Write) -> Result<(), DesignIoError> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| DesignIoError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| DesignIoError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparsity_values() {
        assert_eq!(sparsity(100, 4), Ok(25.0));
        assert_eq!(sparsity(37, 1), Ok(37.0));
        assert_eq!(sparsity(10, 0), Err(DesignIoError::UndefinedSparsity));
    }

    #[test]
    fn table_round_trips_through_csv() {
        let rows = static_benchmarks();
        let mut buf = Vec::new();
        write_benchmark_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("name,source,size,nets,pins,sparsity,llx,lly,urx,ury\n"));
        let back = read_benchmark_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        let r1 = &back[0];
        assert_eq!((r1.nets, r1.pins, r1.sparsity), (36, 30, 1628.40));
    }

    #[test]
    fn bad_header_rejected() {
        let err = read_benchmark_csv("a,b\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, DesignIoError::Csv(_)));
    }
}
