//! Map CSV and signature JSON.
//!
//! Map CSV columns are `gamma,p,label_index,label_name`, rows ordered by `p`
//! then `γ`. Axis values carry 17 significant digits so a round trip is exact.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::atlas::{BehaviorMap, EquivalenceSignature, GridSpec};
use crate::error::{AtlasError, Result};

pub const MAP_CSV_HEADER: [&str; 4] = ["gamma", "p", "label_index", "label_name"];

fn csv_err(e: csv::Error) -> AtlasError {
    match e.kind() {
        csv::ErrorKind::Io(_) => AtlasError::Io(e.to_string()),
        _ => AtlasError::Malformed(e.to_string()),
    }
}

pub fn write_map_csv<W: Write>(m: &BehaviorMap, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MAP_CSV_HEADER).map_err(csv_err)?;
    for ip in 0..m.n_p() {
        for ig in 0..m.n_gamma() {
            let l = m.label(ip, ig);
            w.write_record([
                format!("{:.16e}", m.spec.gamma_samples[ig]),
                format!("{:.16e}", m.spec.p_samples[ip]),
                l.to_string(),
                m.label_name(l).to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn map_to_csv_string(m: &BehaviorMap) -> String {
    let mut buf = Vec::new();
    write_map_csv(m, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Rebuilds a map from CSV. Palette slots for indices that never occur are
/// named `label<i>`.
pub fn read_map_csv<R: Read>(input: R, world_id: &str) -> Result<BehaviorMap> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != MAP_CSV_HEADER {
        return Err(AtlasError::Malformed(format!(
            "expected header `{}`, got `{}`",
            MAP_CSV_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(f64, f64, usize, String)> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |what: &str| AtlasError::Malformed(format!("row {}: bad {what}", line + 2));
        let g: f64 = rec[0].trim().parse().map_err(|_| bad("gamma"))?;
        let p: f64 = rec[1].trim().parse().map_err(|_| bad("p"))?;
        let l: usize = rec[2].trim().parse().map_err(|_| bad("label_index"))?;
        rows.push((g, p, l, rec[3].to_string()));
    }
    if rows.is_empty() {
        return Err(AtlasError::Malformed("map CSV has no rows".into()));
    }
    // γ samples are the leading run of rows with the first p value
    let p0 = rows[0].1;
    let gammas: Vec<f64> = rows.iter().take_while(|r| r.1 == p0).map(|r| r.0).collect();
    let n_g = gammas.len();
    if !rows.len().is_multiple_of(n_g) {
        return Err(AtlasError::Malformed(format!("{} rows do not tile {} gamma samples", rows.len(), n_g)));
    }
    let ps: Vec<f64> = rows.iter().step_by(n_g).map(|r| r.1).collect();
    let mut palette: Vec<Option<String>> = Vec::new();
    let mut labels = Vec::with_capacity(rows.len());
    for (i, (g, p, l, name)) in rows.iter().enumerate() {
        if *g != gammas[i % n_g] || *p != ps[i / n_g] {
            return Err(AtlasError::Malformed(format!("row {} breaks the p-then-gamma grid order", i + 2)));
        }
        if palette.len() <= *l {
            palette.resize(l + 1, None);
        }
        match &palette[*l] {
            Some(known) if known != name => {
                return Err(AtlasError::Malformed(format!(
                    "label index {l} named both `{known}` and `{name}`"
                )))
            }
            Some(_) => {}
            None => palette[*l] = Some(name.clone()),
        }
        labels.push(*l);
    }
    let palette = palette
        .into_iter()
        .enumerate()
        .map(|(i, n)| n.unwrap_or_else(|| format!("label{i}")))
        .collect();
    let spec = GridSpec {
        gamma_samples: gammas,
        p_samples: ps,
    };
    spec.validate().map_err(|e| AtlasError::Malformed(e.to_string()))?;
    BehaviorMap::new(spec, labels, world_id, palette)
}

/// Reads a map file; the world id is the file stem.
pub fn load_map_csv(path: &Path) -> Result<BehaviorMap> {
    let file = fs::File::open(path).map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))?;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("map");
    read_map_csv(file, id)
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| AtlasError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| AtlasError::Io(format!("{}: {e}", path.display())))
}

pub fn save_map_csv(m: &BehaviorMap, path: &Path) -> Result<()> {
    write_file(path, &map_to_csv_string(m))
}

pub fn signature_json(s: &EquivalenceSignature) -> String {
    serde_json::to_string(s).expect("signatures always serialize")
}

pub fn parse_signature_json(text: &str) -> Result<EquivalenceSignature> {
    serde_json::from_str(text).map_err(|e| AtlasError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BehaviorMap {
        let spec = GridSpec::uniform(4, (0.01, 0.99), 3, (0.01, 1.0)).unwrap();
        let labels = vec![0, 0, 1, 1, 0, 1, 1, 1, 0, 0, 0, 1];
        BehaviorMap::new(spec, labels, "sample", vec!["small".into(), "big".into(), "wander".into()]).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = sample();
        let text = map_to_csv_string(&m);
        assert!(text.starts_with("gamma,p,label_index,label_name\n"));
        assert_eq!(text.lines().count(), 13);
        let back = read_map_csv(text.as_bytes(), "sample").unwrap();
        assert_eq!(back.spec, m.spec);
        assert_eq!(back.labels, m.labels);
        assert_eq!(&back.palette[..2], &m.palette[..2]);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(read_map_csv("a,b\n1,2\n".as_bytes(), "x").is_err());
        assert!(read_map_csv("gamma,p,label_index,label_name\n".as_bytes(), "x").is_err());
        let bad = "gamma,p,label_index,label_name\n0.1,0.1,zero,a\n";
        assert!(matches!(read_map_csv(bad.as_bytes(), "x"), Err(AtlasError::Malformed(_))));
    }

    #[test]
    fn signature_json_shape() {
        let s = EquivalenceSignature {
            world: "big-small".into(),
            num_behaviors: 2,
            edge_switches: [1, 0, 1, 0],
        };
        let text = signature_json(&s);
        assert_eq!(text, r#"{"world":"big-small","num_behaviors":2,"edge_switches":[1,0,1,0]}"#);
        assert_eq!(parse_signature_json(&text).unwrap(), s);
    }
}
