//! HTTP JSON API over one immutable dataset.
//!
//! | route | body |
//! |---|---|
//! | `GET /meta` | attribute names, row count, value statistics |
//! | `POST /summarize` | `{k, L, D, algo?, seed?, seeding?, hybrid_c?, phase_a_budget?}` |
//! | `GET /guidance?L=&kmin=&kmax=&dmin=&dmax=` | objective grid, building the store on first use |
//! | `POST /compare` | `{previous?, current}`; `previous` defaults to the client's last summarize |
//!
//! Clients identify themselves with the `x-summit-client` header. Response
//! bodies are canonical JSON, byte-identical to the command-line output.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use lru::LruCache;
use serde::Deserialize;
use serde_json::json;
use summit_core::payload::{self, SummarizeRequest};
use summit_core::store::{precompute, ParamStore, PrecomputeOptions};
use summit_core::{Dataset, Error, Solution};
use tokio::sync::OnceCell;
use tower_http::cors::CorsLayer;

pub const CLIENT_HEADER: &str = "x-summit-client";
pub const PREVIOUS_CAPACITY: usize = 256;
/// Default cap on `grid points × L` for stores built inside a request.
pub const DEFAULT_BUILD_BUDGET: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridKey {
    pub l: usize,
    pub k_range: (usize, usize),
    pub d_range: (usize, usize),
}

impl GridKey {
    fn of(store: &ParamStore) -> Self {
        GridKey { l: store.l(), k_range: store.k_range(), d_range: store.d_range() }
    }

    fn cost(&self) -> u64 {
        let ks = (self.k_range.1 - self.k_range.0 + 1) as u64;
        let ds = (self.d_range.1 - self.d_range.0 + 1) as u64;
        ks.saturating_mul(ds).saturating_mul(self.l as u64)
    }
}

type StoreCell = Arc<OnceCell<Arc<ParamStore>>>;

pub struct AppState {
    dataset: Option<Arc<Dataset>>,
    stores: Mutex<HashMap<GridKey, StoreCell>>,
    previous: Mutex<LruCache<String, Arc<Solution>>>,
    build_budget: u64,
}

impl AppState {
    pub fn new(dataset: Option<Dataset>) -> Self {
        AppState {
            dataset: dataset.map(Arc::new),
            stores: Mutex::new(HashMap::new()),
            previous: Mutex::new(LruCache::new(NonZeroUsize::new(PREVIOUS_CAPACITY).expect("non-zero"))),
            build_budget: DEFAULT_BUILD_BUDGET,
        }
    }

    pub fn with_build_budget(mut self, budget: u64) -> Self {
        self.build_budget = budget;
        self
    }

    /// Serve guidance for this store's exact ranges without rebuilding.
    pub fn with_store(self, store: ParamStore) -> Result<Self, Error> {
        if let Some(ds) = &self.dataset {
            if ds.fingerprint() != store.fingerprint() {
                return Err(Error::StoreMismatch);
            }
        }
        let cell = OnceCell::new_with(Some(Arc::new(store)));
        let key = GridKey::of(cell.get().expect("initialized"));
        self.stores.lock().expect("store map").insert(key, Arc::new(cell));
        Ok(self)
    }

    pub fn remembered_clients(&self) -> usize {
        self.previous.lock().expect("lru").len()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/meta", get(meta))
        .route("/summarize", post(summarize))
        .route("/guidance", get(guidance))
        .route("/compare", post(compare))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = payload::canonical(&json!({ "error": self.1 }));
        (self.0, [(header::CONTENT_TYPE, "application/json")], body).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = if e.is_validation() { StatusCode::UNPROCESSABLE_ENTITY } else { StatusCode::INTERNAL_SERVER_ERROR };
        ApiError(status, e.to_string())
    }
}

fn unprocessable(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::UNPROCESSABLE_ENTITY, msg.into())
}

fn json_body(v: &serde_json::Value) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], payload::canonical(v)).into_response()
}

fn dataset(state: &AppState) -> Result<Arc<Dataset>, ApiError> {
    state
        .dataset
        .clone()
        .ok_or_else(|| ApiError(StatusCode::SERVICE_UNAVAILABLE, "no dataset loaded".into()))
}

fn client(headers: &HeaderMap) -> String {
    headers
        .get(CLIENT_HEADER)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_string()
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| unprocessable(format!("invalid request body: {e}")))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, Error> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(ApiError::from)
}

async fn meta(State(state): State<Arc<AppState>>) -> Result<Response, ApiError> {
    let ds = dataset(&state)?;
    Ok(json_body(&payload::meta_payload(&ds)))
}

async fn run_request(ds: Arc<Dataset>, req: SummarizeRequest) -> Result<Solution, ApiError> {
    blocking(move || req.run(&ds)).await
}

async fn summarize(State(state): State<Arc<AppState>>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let ds = dataset(&state)?;
    let req: SummarizeRequest = parse_body(&body)?;
    let sol = run_request(ds.clone(), req.clone()).await?;
    let out = payload::summarize_payload(&ds, &req, &sol)?;
    state.previous.lock().expect("lru").put(client(&headers), Arc::new(sol));
    Ok(json_body(&out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareRequest {
    #[serde(default)]
    previous: Option<SummarizeRequest>,
    current: SummarizeRequest,
}

async fn compare(State(state): State<Arc<AppState>>, headers: HeaderMap, body: String) -> Result<Response, ApiError> {
    let ds = dataset(&state)?;
    let req: CompareRequest = parse_body(&body)?;
    let old = match req.previous {
        Some(p) => Arc::new(run_request(ds.clone(), p).await?),
        None => state
            .previous
            .lock()
            .expect("lru")
            .get(&client(&headers))
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, "no previous solution for this client".into()))?,
    };
    let new = run_request(ds.clone(), req.current).await?;
    Ok(json_body(&payload::compare_payload(&ds, &old, &new)?))
}

fn grid_key(q: &HashMap<String, String>) -> Result<GridKey, ApiError> {
    let get = |name: &str| -> Result<usize, ApiError> {
        q.get(name)
            .ok_or_else(|| unprocessable(format!("missing query parameter {name}")))?
            .parse()
            .map_err(|_| unprocessable(format!("query parameter {name} must be a non-negative integer")))
    };
    Ok(GridKey { l: get("L")?, k_range: (get("kmin")?, get("kmax")?), d_range: (get("dmin")?, get("dmax")?) })
}

async fn guidance(
    State(state): State<Arc<AppState>>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let ds = dataset(&state)?;
    let key = grid_key(&q)?;
    let cell = {
        let mut stores = state.stores.lock().expect("store map");
        match stores.get(&key) {
            Some(cell) => cell.clone(),
            None => {
                summit_core::Params::new(key.k_range.0.max(1), key.l, key.d_range.1).validate(&ds)?;
                if key.k_range.0 == 0 || key.k_range.0 > key.k_range.1 || key.d_range.0 > key.d_range.1 {
                    return Err(unprocessable("ranges must satisfy 1 <= kmin <= kmax and dmin <= dmax"));
                }
                if key.cost() > state.build_budget {
                    return Err(ApiError(
                        StatusCode::PAYLOAD_TOO_LARGE,
                        format!(
                            "grid of {} points at L={} exceeds the request build budget; build it with `summit precompute` and serve it with --store",
                            key.cost() / key.l as u64,
                            key.l
                        ),
                    ));
                }
                let cell: StoreCell = Arc::new(OnceCell::new());
                stores.insert(key, cell.clone());
                cell
            }
        }
    };
    let store = cell
        .get_or_try_init(|| {
            let ds = ds.clone();
            blocking(move || {
                precompute(&ds, key.l, key.k_range, key.d_range, PrecomputeOptions::default()).map(Arc::new)
            })
        })
        .await?;
    Ok(json_body(&payload::guidance_payload(store)))
}
