#!/usr/bin/env node
import { runPlot } from "../cli.js";

process.exit(runPlot(process.argv.slice(2)));
