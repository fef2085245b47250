#pragma once

#include "ctxdev/context.hpp"
#include "ctxdev/errors.hpp"
#include "ctxdev/event_log.hpp"
#include "ctxdev/experiment.hpp"
#include "ctxdev/io.hpp"
#include "ctxdev/io_csv.hpp"
#include "ctxdev/io_xes.hpp"
#include "ctxdev/kmedoids.hpp"
#include "ctxdev/labels.hpp"
#include "ctxdev/linking.hpp"
#include "ctxdev/measures.hpp"
#include "ctxdev/metrics.hpp"
#include "ctxdev/postprocess.hpp"
#include "ctxdev/scorers.hpp"
#include "ctxdev/serialization.hpp"
#include "ctxdev/synthetic.hpp"
#include "ctxdev/time.hpp"
#include "ctxdev/time_span.hpp"
#include "ctxdev/toml_lite.hpp"
