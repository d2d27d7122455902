//! Catalog of the SNAP networks used for the real-network comparison.

use std::path::{Path, PathBuf};

/// One SNAP dataset with its published statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub url: &'static str,
    /// Member to extract when the download is a tarball.
    pub archive_member: Option<&'static str>,
    pub nodes: usize,
    pub edges: usize,
    pub mean_jaccard: f64,
    pub max_jaccard: f64,
    pub diameter: u32,
    pub avg_clustering: f64,
    /// Excluded from default runs.
    pub large: bool,
}

impl DatasetInfo {
    /// Local file name of the decompressed edge list.
    pub fn file_name(&self) -> String {
        format!("{}.txt", self.name)
    }

    /// Original file name on the SNAP server, without compression suffix.
    pub fn upstream_stem(&self) -> &'static str {
        if let Some(member) = self.archive_member {
            return member.trim_end_matches(".txt");
        }
        let file = self.url.rsplit('/').next().unwrap_or(self.url);
        file.trim_end_matches(".gz").trim_end_matches(".txt")
    }

    /// First existing candidate path for this dataset under `dir`.
    pub fn locate(&self, dir: &Path) -> Option<PathBuf> {
        let stems = [self.name, self.upstream_stem()];
        stems
            .iter()
            .flat_map(|s| [format!("{s}.txt"), format!("{s}.txt.gz")])
            .map(|f| dir.join(f))
            .find(|p| p.is_file())
    }
}

macro_rules! ds {
    ($name:expr, $url:expr, $member:expr, $nodes:expr, $edges:expr, $mean:expr, $max:expr, $diam:expr, $cc:expr, $large:expr) => {
        DatasetInfo {
            name: $name,
            url: $url,
            archive_member: $member,
            nodes: $nodes,
            edges: $edges,
            mean_jaccard: $mean,
            max_jaccard: $max,
            diameter: $diam,
            avg_clustering: $cc,
            large: $large,
        }
    };
}

pub static DATASETS: [DatasetInfo; 16] = [
    ds!(
        "as-733",
        "https://snap.stanford.edu/data/as-733.tar.gz",
        Some("as20000102.txt"),
        6_474,
        13_895,
        0.024,
        0.667,
        9,
        0.2522,
        false
    ),
    ds!(
        "ca-AstroPh",
        "https://snap.stanford.edu/data/ca-AstroPh.txt.gz",
        None,
        18_772,
        198_110,
        0.013,
        1.0,
        14,
        0.6306,
        false
    ),
    ds!(
        "ca-CondMat",
        "https://snap.stanford.edu/data/ca-CondMat.txt.gz",
        None,
        23_133,
        93_497,
        0.033,
        1.0,
        14,
        0.6334,
        false
    ),
    ds!(
        "ca-GrQc",
        "https://snap.stanford.edu/data/ca-GrQc.txt.gz",
        None,
        5_242,
        14_496,
        0.046,
        1.0,
        17,
        0.5296,
        false
    ),
    ds!(
        "ca-HepPh",
        "https://snap.stanford.edu/data/ca-HepPh.txt.gz",
        None,
        12_008,
        118_521,
        0.018,
        1.0,
        13,
        0.6115,
        false
    ),
    ds!(
        "ca-HepTh",
        "https://snap.stanford.edu/data/ca-HepTh.txt.gz",
        None,
        9_877,
        25_998,
        0.024,
        1.0,
        17,
        0.4714,
        false
    ),
    ds!(
        "com-Amazon",
        "https://snap.stanford.edu/data/bigdata/communities/com-amazon.ungraph.txt.gz",
        None,
        334_863,
        925_872,
        0.103,
        0.962,
        44,
        0.3967,
        false
    ),
    ds!(
        "com-DBLP",
        "https://snap.stanford.edu/data/bigdata/communities/com-dblp.ungraph.txt.gz",
        None,
        317_080,
        1_049_866,
        0.096,
        0.933,
        21,
        0.6324,
        false
    ),
    ds!(
        "email-Enron",
        "https://snap.stanford.edu/data/email-Enron.txt.gz",
        None,
        36_692,
        183_831,
        0.068,
        1.0,
        11,
        0.4970,
        false
    ),
    ds!(
        "ego-Facebook",
        "https://snap.stanford.edu/data/facebook_combined.txt.gz",
        None,
        4_039,
        88_234,
        0.063,
        0.929,
        8,
        0.6055,
        false
    ),
    ds!(
        "loc-Gowalla",
        "https://snap.stanford.edu/data/loc-gowalla_edges.txt.gz",
        None,
        196_591,
        950_327,
        0.040,
        0.875,
        14,
        0.2367,
        false
    ),
    ds!(
        "Oregon-1",
        "https://snap.stanford.edu/data/oregon1_010526.txt.gz",
        None,
        11_174,
        23_409,
        0.001,
        0.4,
        9,
        0.2964,
        false
    ),
    ds!(
        "Oregon-2",
        "https://snap.stanford.edu/data/oregon2_010526.txt.gz",
        None,
        11_461,
        32_730,
        0.001,
        0.524,
        9,
        0.4943,
        false
    ),
    ds!(
        "roadNet-CA",
        "https://snap.stanford.edu/data/roadNet-CA.txt.gz",
        None,
        1_965_206,
        2_766_607,
        0.047,
        1.0,
        849,
        0.0464,
        true
    ),
    ds!(
        "roadNet-PA",
        "https://snap.stanford.edu/data/roadNet-PA.txt.gz",
        None,
        1_088_092,
        1_541_898,
        0.047,
        1.0,
        786,
        0.0465,
        true
    ),
    ds!(
        "roadNet-TX",
        "https://snap.stanford.edu/data/roadNet-TX.txt.gz",
        None,
        1_379_917,
        1_921_660,
        0.047,
        1.0,
        1054,
        0.0470,
        true
    ),
];

/// Case-insensitive lookup by catalog name or upstream file stem.
pub fn lookup(name: &str) -> Option<&'static DatasetInfo> {
    DATASETS
        .iter()
        .find(|d| d.name.eq_ignore_ascii_case(name) || d.upstream_stem().eq_ignore_ascii_case(name))
}

pub fn names() -> Vec<&'static str> {
    DATASETS.iter().map(|d| d.name).collect()
}

/// Datasets a default run covers.
pub fn default_selection(include_large: bool) -> Vec<&'static DatasetInfo> {
    DATASETS.iter().filter(|d| include_large || !d.large).collect()
}
