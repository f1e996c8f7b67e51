use std::fmt;
use std::str::FromStr;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

/// Everything outside the RFC 3986 unreserved set is encoded, so an
/// identifier always renders as one opaque path segment.
const IDENTIFIER: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Percent-encodes `identifier` as a single path segment.
pub fn encode_identifier(identifier: &str) -> String {
    utf8_percent_encode(identifier, IDENTIFIER).to_string()
}

/// Decodes a percent-encoded segment; `None` if the bytes are not UTF-8.
pub fn decode_segment(segment: &str) -> Option<String> {
    percent_decode_str(segment).decode_utf8().ok().map(|s| s.into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Http,
    Https,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Http => "http",
            Scheme::Https => "https",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseUriError {
    #[error("unsupported scheme in `{0}`")]
    Scheme(String),
    #[error("missing server in `{0}`")]
    Server(String),
    #[error("missing identifier in `{0}`")]
    Identifier(String),
    #[error("identifier `{0}` is not valid percent-encoded UTF-8")]
    Encoding(String),
}

/// `{scheme}://{server}{/prefix}`: the part of a base URI shared by every
/// image on one service.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ServiceRoot {
    pub scheme: Scheme,
    pub server: String,
    /// Stored without leading or trailing slash; `None` when empty.
    pub prefix: Option<String>,
}

impl ServiceRoot {
    pub fn new(scheme: Scheme, server: impl Into<String>, prefix: Option<&str>) -> Self {
        let prefix = prefix
            .map(|p| p.trim_matches('/').to_string())
            .filter(|p| !p.is_empty());
        ServiceRoot { scheme, server: server.into(), prefix }
    }

    pub fn base_for(&self, identifier: &str) -> BaseUri {
        BaseUri { root: self.clone(), identifier: identifier.to_string() }
    }
}

impl fmt::Display for ServiceRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}://{}", self.scheme.as_str(), self.server)?;
        if let Some(prefix) = &self.prefix {
            write!(f, "/{prefix}")?;
        }
        Ok(())
    }
}

impl FromStr for ServiceRoot {
    type Err = BaseUriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (scheme, rest) = if let Some(rest) = s.strip_prefix("https://") {
            (Scheme::Https, rest)
        } else if let Some(rest) = s.strip_prefix("http://") {
            (Scheme::Http, rest)
        } else {
            return Err(BaseUriError::Scheme(s.to_string()));
        };
        let rest = rest.trim_end_matches('/');
        let (server, prefix) = match rest.split_once('/') {
            Some((server, prefix)) => (server, Some(prefix)),
            None => (rest, None),
        };
        if server.is_empty() {
            return Err(BaseUriError::Server(s.to_string()));
        }
        Ok(ServiceRoot::new(scheme, server, prefix))
    }
}

/// `{scheme}://{server}{/prefix}/{identifier}`.
///
/// The identifier is held decoded and rendered percent-encoded, so it never
/// contributes an unencoded `/`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseUri {
    pub root: ServiceRoot,
    identifier: String,
}

impl BaseUri {
    pub fn new(root: ServiceRoot, identifier: impl Into<String>) -> Result<Self, BaseUriError> {
        let identifier = identifier.into();
        if identifier.is_empty() {
            return Err(BaseUriError::Identifier(root.to_string()));
        }
        Ok(BaseUri { root, identifier })
    }

    pub fn identifier(&self) -> &str {
        &self.identifier
    }

    pub fn encoded_identifier(&self) -> String {
        encode_identifier(&self.identifier)
    }

    pub fn info_url(&self) -> String {
        format!("{self}/info.json")
    }
}

impl fmt::Display for BaseUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.root, self.encoded_identifier())
    }
}

/// Parses a base URI; the last path segment is the identifier.
impl FromStr for BaseUri {
    type Err = BaseUriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim_end_matches('/');
        let (root, encoded) = trimmed
            .rsplit_once('/')
            .filter(|(root, _)| !root.ends_with('/'))
            .ok_or_else(|| BaseUriError::Identifier(s.to_string()))?;
        let root: ServiceRoot = root.parse()?;
        let identifier =
            decode_segment(encoded).ok_or_else(|| BaseUriError::Encoding(encoded.to_string()))?;
        BaseUri::new(root, identifier)
    }
}
