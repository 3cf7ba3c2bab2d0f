use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use lexatlas::format::FORMAT_VERSION;
use lexatlas::xlink::link_word;
use lexatlas::{
    cross_navigate, query_word, sentences_for_clique, Atlas, Clique, CliqueId, LexicalUnit, LinkParams, SemanticMap,
    SenseLink, SentenceId,
};
use serde::Serialize;

use crate::config::Catalog;

pub type Shared = Arc<Catalog>;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn not_found(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into() }
    }
}

impl From<lexatlas::Error> for ApiError {
    fn from(e: lexatlas::Error) -> Self {
        use lexatlas::Error as E;
        let status = match e {
            E::NotFound(_) | E::UnknownUnit(_) => StatusCode::NOT_FOUND,
            E::InvalidParameter(_) | E::InvalidUnit(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError { status, message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Serialize)]
pub struct LanguageInfo {
    pub language: String,
    pub entries: usize,
    pub cliques: usize,
    pub sentences: usize,
}

#[derive(Debug, Serialize)]
pub struct LangsBody {
    pub format_version: u32,
    pub languages: Vec<LanguageInfo>,
    /// Language pairs with a usable dictionary, as `[source, target]`.
    pub links: Vec<[String; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Point {
    pub clique: CliqueId,
    pub xy: [f64; 2],
}

#[derive(Debug, Serialize)]
pub struct MapBody<'a> {
    pub language: &'a str,
    pub target: &'a LexicalUnit,
    pub map: &'a SemanticMap,
    pub cliques: &'a [Clique],
    /// Clique positions on the first two axes, zero-padded below rank 2.
    pub points: Vec<Point>,
}

#[derive(Debug, Serialize)]
pub struct Sentence {
    pub id: SentenceId,
    pub text: String,
}

#[derive(Debug, Serialize)]
pub struct SentencesBody {
    pub language: String,
    pub clique: CliqueId,
    pub target: LexicalUnit,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Serialize)]
pub struct LinkBody {
    pub source: String,
    pub target: String,
    pub word: String,
    pub params: LinkParams,
    pub links: Vec<SenseLink>,
}

#[derive(Debug, Serialize)]
pub struct LinkedGroup {
    pub link: SenseLink,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Serialize)]
pub struct CrossBody {
    pub source: String,
    pub target: String,
    pub clique: CliqueId,
    pub params: LinkParams,
    pub groups: Vec<LinkedGroup>,
}

pub fn router(catalog: Shared) -> Router {
    Router::new()
        .route("/v1/langs", get(langs))
        .route("/v1/{lang}/map/{unit}", get(map))
        .route("/v1/{lang}/clique/{id}/sentences", get(clique_sentences))
        .route("/v1/link/{src}/{tgt}/{unit}", get(link))
        .route("/v1/link/{src}/{tgt}/clique/{id}/sentences", get(cross))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(catalog)
}

fn atlas<'a>(c: &'a Catalog, lang: &str) -> Result<&'a Atlas, ApiError> {
    c.atlases.get(lang).ok_or_else(|| ApiError::not_found(format!("language {lang} is not loaded")))
}

fn sentences(rows: Vec<(SentenceId, String)>) -> Vec<Sentence> {
    rows.into_iter().map(|(id, text)| Sentence { id, text }).collect()
}

fn link_params(query: &BTreeMap<String, String>) -> Result<LinkParams, ApiError> {
    let mut params = LinkParams::default();
    for (k, v) in query {
        match k.as_str() {
            "theta" => {
                params.theta = v.parse().map_err(|_| ApiError::bad_request(format!("theta is not a number: {v}")))?
            }
            "min_overlap" => {
                params.overlap_min =
                    v.parse().map_err(|_| ApiError::bad_request(format!("min_overlap is not a count: {v}")))?
            }
            _ => return Err(ApiError::bad_request(format!("unknown parameter {k}"))),
        }
    }
    params.validate()?;
    Ok(params)
}

async fn langs(State(c): State<Shared>) -> Json<LangsBody> {
    let languages = c
        .atlases
        .iter()
        .map(|(lang, a)| LanguageInfo {
            language: lang.clone(),
            entries: a.entries.len(),
            cliques: a.clique_count(),
            sentences: a.sentences.len(),
        })
        .collect();
    let links = c
        .dictionaries
        .keys()
        .filter(|(s, t)| c.atlases.contains_key(s) && c.atlases.contains_key(t))
        .map(|(s, t)| [s.clone(), t.clone()])
        .collect();
    Json(LangsBody { format_version: FORMAT_VERSION, languages, links })
}

async fn map(State(c): State<Shared>, Path((lang, unit)): Path<(String, String)>) -> Response {
    let result = (|| {
        let a = atlas(&c, &lang)?;
        let u = a.resolve(&unit).ok_or_else(|| ApiError::not_found(format!("no entry for {unit} in {lang}")))?;
        let view = query_word(a, &u)?.ok_or_else(|| ApiError::not_found(format!("no entry for {unit} in {lang}")))?;
        let points = (0..view.cliques.len())
            .map(|i| Point { clique: view.map.clique_ids[i].clone(), xy: view.map.clique_xy(i) })
            .collect();
        let body = MapBody { language: &a.language, target: view.target, map: view.map, cliques: view.cliques, points };
        Ok::<_, ApiError>(Json(body).into_response())
    })();
    result.unwrap_or_else(IntoResponse::into_response)
}

async fn clique_sentences(
    State(c): State<Shared>,
    Path((lang, id)): Path<(String, String)>,
) -> ApiResult<SentencesBody> {
    let a = atlas(&c, &lang)?;
    let id = CliqueId(id);
    let target = a.owner(&id).ok_or_else(|| ApiError::not_found(format!("clique {id} in {lang}")))?.clone();
    let rows = sentences_for_clique(a, &id)?;
    Ok(Json(SentencesBody { language: lang, clique: id, target, sentences: sentences(rows) }))
}

async fn link(
    State(c): State<Shared>,
    Path((src, tgt, unit)): Path<(String, String, String)>,
    Query(query): Query<BTreeMap<String, String>>,
) -> ApiResult<LinkBody> {
    let params = link_params(&query)?;
    let (sa, ta) = (atlas(&c, &src)?, atlas(&c, &tgt)?);
    let dict = c.dictionary(&src, &tgt).ok_or_else(|| ApiError::not_found(format!("no dictionary {src}->{tgt}")))?;
    let links = link_word(sa, &unit, ta, dict, &params)?;
    Ok(Json(LinkBody { source: src, target: tgt, word: unit, params, links }))
}

async fn cross(
    State(c): State<Shared>,
    Path((src, tgt, id)): Path<(String, String, String)>,
    Query(query): Query<BTreeMap<String, String>>,
) -> ApiResult<CrossBody> {
    let params = link_params(&query)?;
    let (sa, ta) = (atlas(&c, &src)?, atlas(&c, &tgt)?);
    let dict = c.dictionary(&src, &tgt).ok_or_else(|| ApiError::not_found(format!("no dictionary {src}->{tgt}")))?;
    let id = CliqueId(id);
    let groups = cross_navigate(sa, &id, ta, dict, &params)?
        .into_iter()
        .map(|g| LinkedGroup { link: g.link, sentences: sentences(g.sentences) })
        .collect();
    Ok(Json(CrossBody { source: src, target: tgt, clique: id, params, groups }))
}
