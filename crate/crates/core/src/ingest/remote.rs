use super::{load_grid, IngestError};
use crate::model::GridProfile;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Duration;

/// Environment variable read by [`GridClient::from_env`].
pub const ENDPOINT_ENV: &str = "REFRESH_GRID_ENDPOINT";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

#[derive(Debug, Deserialize)]
struct IntensityResponse {
    #[serde(alias = "intensity")]
    intensity_g_per_kwh: f64,
    #[serde(default)]
    renewable_fraction: f64,
}

/// Client for a grid-intensity service answering
/// `GET {endpoint}/v1/intensity?region=...`.
#[derive(Debug, Clone)]
pub struct GridClient {
    endpoint: String,
    timeout: Duration,
}

impl GridClient {
    pub fn new(endpoint: &str) -> Result<Self, IngestError> {
        let trimmed = endpoint.trim().trim_end_matches('/');
        let host = trimmed
            .strip_prefix("http://")
            .or_else(|| trimmed.strip_prefix("https://"));
        match host {
            Some(h) if !h.is_empty() => Ok(Self {
                endpoint: trimmed.to_string(),
                timeout: DEFAULT_TIMEOUT,
            }),
            _ => Err(IngestError::InvalidEndpoint(endpoint.to_string())),
        }
    }

    /// `None` when the variable is unset or empty.
    pub fn from_env() -> Option<Result<Self, IngestError>> {
        match std::env::var(ENDPOINT_ENV) {
            Ok(v) if !v.trim().is_empty() => Some(Self::new(&v)),
            _ => None,
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn fetch(&self, region: &str) -> Result<GridProfile, IngestError> {
        let network = |detail: String| IngestError::Network {
            endpoint: self.endpoint.clone(),
            region: region.to_string(),
            detail,
        };
        let schema = |detail: String| IngestError::RemoteSchema {
            endpoint: self.endpoint.clone(),
            region: region.to_string(),
            detail,
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let url = format!("{}/v1/intensity", self.endpoint);
        let mut response = agent
            .get(&url)
            .query("region", region)
            .call()
            .map_err(|e| network(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(network(format!("HTTP status {}", status.as_u16())));
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| network(e.to_string()))?;
        let parsed: IntensityResponse = serde_json::from_str(&body).map_err(|e| schema(e.to_string()))?;
        GridProfile::new(parsed.intensity_g_per_kwh, parsed.renewable_fraction, 0.0).map_err(|e| schema(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Remote,
    File,
    /// The remote fetch failed and the fallback file was used.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FetchedGrid {
    pub profile: GridProfile,
    pub provenance: Provenance,
    /// Why the fallback was taken, when it was.
    pub detail: Option<String>,
}

/// Fetches the grid for `region`, falling back to a local grid file if the
/// request fails and one is given.
pub fn fetch_grid_intensity(endpoint: &str, region: &str, fallback: Option<&Path>) -> Result<FetchedGrid, IngestError> {
    let remote = GridClient::new(endpoint).and_then(|c| c.fetch(region));
    match (remote, fallback) {
        (Ok(profile), _) => Ok(FetchedGrid {
            profile,
            provenance: Provenance::Remote,
            detail: None,
        }),
        (Err(e), Some(path)) => Ok(FetchedGrid {
            profile: load_grid(path)?,
            provenance: Provenance::Fallback,
            detail: Some(e.to_string()),
        }),
        (Err(e), None) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bundled;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// Serves `body` with `status` to a single request and returns the
    /// endpoint URL plus a handle yielding the request line.
    fn serve_once(status: &'static str, body: &'static str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut buf = [0u8; 4096];
            let n = stream.read(&mut buf).unwrap();
            let request = String::from_utf8_lossy(&buf[..n]).to_string();
            let reply = format!(
                "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
            request.lines().next().unwrap_or_default().to_string()
        });
        (url, handle)
    }

    fn unreachable_endpoint() -> String {
        // bind then drop so nothing is listening on the port
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        drop(listener);
        url
    }

    #[test]
    fn fetches_from_service() {
        let (url, handle) = serve_once(
            "200 OK",
            r#"{"region": "TW", "intensity_g_per_kwh": 250, "renewable_fraction": 0.4}"#,
        );
        let got = fetch_grid_intensity(&url, "TW", None).unwrap();
        assert_eq!(got.provenance, Provenance::Remote);
        assert_eq!(got.profile.base_intensity().0, 250.0);
        assert_eq!(got.profile.renewable_fraction(), 0.4);
        assert_eq!(handle.join().unwrap(), "GET /v1/intensity?region=TW HTTP/1.1");
    }

    #[test]
    fn accepts_short_field_name() {
        let (url, handle) = serve_once("200 OK", r#"{"intensity": 300}"#);
        let got = GridClient::new(&url).unwrap().fetch("x").unwrap();
        assert_eq!(got.base_intensity().0, 300.0);
        assert_eq!(got.renewable_fraction(), 0.0);
        handle.join().unwrap();
    }

    #[test]
    fn unreachable_without_fallback_names_endpoint_and_region() {
        let url = unreachable_endpoint();
        let client = GridClient::new(&url).unwrap().with_timeout(Duration::from_secs(2));
        let err = client.fetch("DE").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, IngestError::Network { .. }));
        assert!(msg.contains(&url) && msg.contains("DE"), "{msg}");
    }

    #[test]
    fn unreachable_with_fallback() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        std::fs::write(&path, bundled::GRID_90PCT_RENEWABLES_JSON).unwrap();
        let got = fetch_grid_intensity(&unreachable_endpoint(), "DE", Some(&path)).unwrap();
        assert_eq!(got.provenance, Provenance::Fallback);
        assert_eq!(got.profile, bundled::grid("grid_90pct_renewables").unwrap());
        assert!(got.detail.is_some());
    }

    #[test]
    fn bad_payloads() {
        let (url, handle) = serve_once("200 OK", r#"{"region": "TW"}"#);
        assert!(matches!(
            GridClient::new(&url).unwrap().fetch("TW"),
            Err(IngestError::RemoteSchema { .. })
        ));
        handle.join().unwrap();

        let (url, handle) = serve_once("200 OK", r#"{"intensity": -5}"#);
        assert!(matches!(
            GridClient::new(&url).unwrap().fetch("TW"),
            Err(IngestError::RemoteSchema { .. })
        ));
        handle.join().unwrap();

        let (url, handle) = serve_once("503 Service Unavailable", "{}");
        let err = GridClient::new(&url).unwrap().fetch("TW").unwrap_err();
        assert!(err.to_string().contains("503"), "{err}");
        handle.join().unwrap();
    }

    #[test]
    fn endpoint_validation() {
        assert!(GridClient::new("ftp://x").is_err());
        assert!(GridClient::new("http://").is_err());
        assert_eq!(
            GridClient::new("https://grid.example/").unwrap().endpoint(),
            "https://grid.example"
        );
    }
}
