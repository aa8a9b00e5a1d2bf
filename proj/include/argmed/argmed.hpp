#pragma once

#include "argmed/aaf.hpp"
#include "argmed/aaf_io.hpp"
#include "argmed/agents.hpp"
#include "argmed/decision.hpp"
#include "argmed/dialogue.hpp"
#include "argmed/dot_export.hpp"
#include "argmed/errors.hpp"
#include "argmed/http_backend.hpp"
#include "argmed/schemes.hpp"
#include "argmed/semantics.hpp"
