use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One checked property of one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub certificate: String,
    pub paper_tag: String,
    pub status: Status,
    pub detail: String,
}

impl Certificate {
    pub fn new(name: impl Into<String>, tag: &str, pass: bool, detail: impl Into<String>) -> Self {
        Certificate {
            certificate: name.into(),
            paper_tag: tag.to_owned(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub status: Status,
    pub certificates: Vec<Certificate>,
}

impl Report {
    pub fn new(command: &str, seed: u64, certificates: Vec<Certificate>) -> Self {
        let status = if certificates.iter().all(Certificate::passed) { Status::Pass } else { Status::Fail };
        Report { command: command.to_owned(), seed, status, certificates }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
