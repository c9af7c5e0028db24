//! Download and conversion of public benchmark graphs into edge lists.
//!
//! Directed sources are symmetrized; self-loops and duplicate pairs are
//! dropped. Upstream files publish no digests, so the SHA-256 of each archive
//! is recorded in `checksums.sha256` on first download and verified on later
//! runs (or against a file passed with `--checksums`).

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use flate2::read::GzDecoder;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    /// Gzipped whitespace-separated pairs with `#` comments.
    SnapGz,
    /// Pajek `.net` with `*Vertices` and `*Edges`/`*Arcs` sections.
    Pajek,
}

#[derive(Debug, Clone, Copy)]
pub struct Dataset {
    pub name: &'static str,
    pub url: &'static str,
    pub format: SourceFormat,
    /// Published sizes, used as a sanity check after conversion.
    pub nodes: usize,
    pub edges: usize,
}

pub const DATASETS: [Dataset; 6] = [
    Dataset {
        name: "amazon0302",
        url: "https://snap.stanford.edu/data/amazon0302.txt.gz",
        format: SourceFormat::SnapGz,
        nodes: 262_111,
        edges: 1_234_877,
    },
    Dataset {
        name: "ca-CondMat",
        url: "https://snap.stanford.edu/data/ca-CondMat.txt.gz",
        format: SourceFormat::SnapGz,
        nodes: 23_133,
        edges: 93_497,
    },
    Dataset {
        name: "com-amazon",
        url: "https://snap.stanford.edu/data/bigdata/communities/com-amazon.ungraph.txt.gz",
        format: SourceFormat::SnapGz,
        nodes: 334_863,
        edges: 925_872,
    },
    Dataset {
        name: "com-youtube",
        url: "https://snap.stanford.edu/data/bigdata/communities/com-youtube.ungraph.txt.gz",
        format: SourceFormat::SnapGz,
        nodes: 1_134_890,
        edges: 2_987_624,
    },
    Dataset {
        name: "soc-Epinions1",
        url: "https://snap.stanford.edu/data/soc-Epinions1.txt.gz",
        format: SourceFormat::SnapGz,
        nodes: 75_879,
        edges: 508_837,
    },
    Dataset {
        name: "USAir97",
        url: "http://vlado.fmf.uni-lj.si/pub/networks/data/mix/USAir97.net",
        format: SourceFormat::Pajek,
        nodes: 332,
        edges: 2_126,
    },
];

pub fn find(name: &str) -> Option<&'static Dataset> {
    DATASETS.iter().find(|d| d.name.eq_ignore_ascii_case(name))
}

/// Undirected simple edge list built from arbitrary pairs.
#[derive(Debug, Default)]
pub struct EdgeAccumulator {
    seen: HashSet<(String, String)>,
    lines: Vec<String>,
    nodes: HashSet<String>,
}

impl EdgeAccumulator {
    pub fn push(&mut self, a: &str, b: &str, weight: Option<f64>) {
        if a == b {
            return;
        }
        let key = if a < b {
            (a.to_owned(), b.to_owned())
        } else {
            (b.to_owned(), a.to_owned())
        };
        if self.seen.insert(key) {
            self.nodes.insert(a.to_owned());
            self.nodes.insert(b.to_owned());
            self.lines.push(match weight {
                Some(w) => format!("{a} {b} {w}"),
                None => format!("{a} {b}"),
            });
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.lines.len()
    }

    pub fn into_edge_list(self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

pub fn convert_snap(text: &str) -> Result<EdgeAccumulator> {
    let mut acc = EdgeAccumulator::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next()) {
            (Some(a), Some(b)) => acc.push(a, b, None),
            _ => bail!("line {}: expected two node ids", i + 1),
        }
    }
    Ok(acc)
}

/// Pajek networks; vertex numbers become labels, weights are kept.
pub fn convert_pajek(text: &str) -> Result<EdgeAccumulator> {
    let mut acc = EdgeAccumulator::default();
    let mut in_edges = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('*') {
            let section = line.to_ascii_lowercase();
            in_edges = section.starts_with("*edges") || section.starts_with("*arcs");
            continue;
        }
        if !in_edges {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            bail!("line {}: expected `u v [weight]`", i + 1);
        }
        let weight = match fields.get(2) {
            Some(w) => Some(
                w.parse::<f64>()
                    .with_context(|| format!("line {}: bad weight `{w}`", i + 1))?,
            ),
            None => None,
        };
        acc.push(fields[0], fields[1], weight.filter(|w| *w > 0.0));
    }
    Ok(acc)
}

fn read_checksums(path: &Path) -> Result<BTreeMap<String, String>> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((
                it.nth(1)?.to_owned(),
                l.split_whitespace().next()?.to_owned(),
            ))
        })
        .collect())
}

fn write_checksums(path: &Path, sums: &BTreeMap<String, String>) -> Result<()> {
    let text: String = sums
        .iter()
        .map(|(file, sum)| format!("{sum}  {file}\n"))
        .collect();
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn download(url: &str) -> Result<Vec<u8>> {
    let resp = reqwest::blocking::get(url).with_context(|| format!("cannot fetch {url}"))?;
    if !resp.status().is_success() {
        bail!("fetching {url}: HTTP {}", resp.status());
    }
    Ok(resp
        .bytes()
        .with_context(|| format!("reading {url}"))?
        .to_vec())
}

#[derive(Debug)]
pub struct FetchReport {
    pub name: &'static str,
    pub path: PathBuf,
    pub nodes: usize,
    pub edges: usize,
    pub sha256: String,
}

/// Downloads (unless the archive is already in `dest`), verifies and converts one dataset.
pub fn fetch(ds: &Dataset, dest: &Path, pinned: &BTreeMap<String, String>) -> Result<FetchReport> {
    fs::create_dir_all(dest).with_context(|| format!("cannot create {}", dest.display()))?;
    let archive_name = ds.url.rsplit('/').next().unwrap_or(ds.name).to_owned();
    let archive = dest.join(&archive_name);
    let bytes = if archive.exists() {
        fs::read(&archive).with_context(|| format!("cannot read {}", archive.display()))?
    } else {
        let b = download(ds.url)?;
        fs::write(&archive, &b).with_context(|| format!("cannot write {}", archive.display()))?;
        b
    };
    let sum = sha256_hex(&bytes);
    let ledger = dest.join("checksums.sha256");
    let mut recorded = read_checksums(&ledger)?;
    if let Some(expected) = pinned
        .get(&archive_name)
        .or_else(|| recorded.get(&archive_name))
    {
        if expected != &sum {
            bail!(
                "checksum mismatch for {}: expected {expected}, got {sum}",
                archive.display()
            );
        }
    }
    recorded.insert(archive_name, sum.clone());
    write_checksums(&ledger, &recorded)?;
    let text = match ds.format {
        SourceFormat::SnapGz => {
            let mut s = String::new();
            GzDecoder::new(&bytes[..])
                .read_to_string(&mut s)
                .with_context(|| format!("cannot decompress {}", archive.display()))?;
            s
        }
        SourceFormat::Pajek => String::from_utf8_lossy(&bytes).into_owned(),
    };
    let acc = match ds.format {
        SourceFormat::SnapGz => convert_snap(&text),
        SourceFormat::Pajek => convert_pajek(&text),
    }
    .with_context(|| format!("converting {}", archive.display()))?;
    let (nodes, edges) = (acc.node_count(), acc.edge_count());
    let path = dest.join(format!("{}.edges", ds.name));
    fs::write(&path, acc.into_edge_list())
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(FetchReport {
        name: ds.name,
        path,
        nodes,
        edges,
        sha256: sum,
    })
}

pub fn load_pinned(path: Option<&Path>) -> Result<BTreeMap<String, String>> {
    match path {
        Some(p) => {
            if !p.exists() {
                bail!("checksum file {} does not exist", p.display());
            }
            read_checksums(p)
        }
        None => Ok(BTreeMap::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::write::GzEncoder;
    use std::io::Write;

    #[test]
    fn snap_is_symmetrized_and_deduplicated() {
        let acc =
            convert_snap("# Directed graph\n# FromNodeId\tToNodeId\n0\t1\n1\t0\n1\t2\n2\t2\n")
                .unwrap();
        assert_eq!((acc.node_count(), acc.edge_count()), (3, 2));
        assert_eq!(acc.into_edge_list(), "0 1\n1 2\n");
        assert!(convert_snap("7\n").is_err());
    }

    #[test]
    fn pajek_edges_with_weights() {
        let net = "*Vertices 3\n1 \"Atlanta\" 0.1 0.2 0.5\n2 \"Boston\" 0.3 0.4 0.5\n3 \"Chicago\" 0.5 0.5 0.5\n*Arcs\n*Edges\n1 2 0.25\n2 1 0.25\n2 3 0.5\n";
        let acc = convert_pajek(net).unwrap();
        assert_eq!(acc.into_edge_list(), "1 2 0.25\n2 3 0.5\n");
        assert!(convert_pajek("*Edges\n1 2 heavy\n").is_err());
    }

    #[test]
    fn catalogue_matches_published_sizes() {
        let ca = find("ca-condmat").unwrap();
        assert_eq!((ca.nodes, ca.edges), (23_133, 93_497));
        assert_eq!(find("usair97").unwrap().format, SourceFormat::Pajek);
        assert!(find("karate").is_none());
    }

    #[test]
    fn cached_archive_is_verified_and_converted() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        let mut gz = GzEncoder::new(Vec::new(), flate2::Compression::default());
        gz.write_all(b"# test\n1 2\n2 3\n3 1\n").unwrap();
        let bytes = gz.finish().unwrap();
        fs::write(dir.join("ca-CondMat.txt.gz"), &bytes).unwrap();
        let ds = find("ca-CondMat").unwrap();
        let report = fetch(ds, dir, &BTreeMap::new()).unwrap();
        assert_eq!((report.nodes, report.edges), (3, 3));
        assert_eq!(report.sha256, sha256_hex(&bytes));
        assert!(fs::read_to_string(dir.join("checksums.sha256"))
            .unwrap()
            .contains("ca-CondMat.txt.gz"));
        // a tampered archive is rejected against the recorded digest
        fs::write(dir.join("ca-CondMat.txt.gz"), b"junk").unwrap();
        assert!(fetch(ds, dir, &BTreeMap::new())
            .unwrap_err()
            .to_string()
            .contains("checksum mismatch"));
    }
}
