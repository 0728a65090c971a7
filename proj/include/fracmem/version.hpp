#pragma once

#define FRACMEM_VERSION "0.1.0"
