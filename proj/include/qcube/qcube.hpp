#pragma once

#include <qcube/bounds.hpp>
#include <qcube/containers.hpp>
#include <qcube/count.hpp>
#include <qcube/cube.hpp>
#include <qcube/enumeration.hpp>
#include <qcube/error.hpp>
#include <qcube/profile.hpp>
