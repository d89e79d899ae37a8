#pragma once

#define LATENTGEO_VERSION "0.1.0"
